// Command-line front end for the irony-detection pipeline.

#include "irony/config.hpp"
#include "irony/log.hpp"
#include "irony/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kConfigError = 2, kMissingStage = 3 };

int execute(const std::string& config_path, const std::vector<irony::Stage>& stages, bool dry_run) {
    try {
        irony::Pipeline pipeline(irony::load_config(config_path));
        if (dry_run) {
            for (const auto& line : pipeline.plan(stages)) std::cout << line << "\n";
            return kOk;
        }
        for (auto stage : stages) pipeline.run_stage(stage);
        const auto& record = pipeline.record();
        std::cout << "manifest: " << pipeline.manifest_path() << "\n";
        for (const auto& p : record.report_paths) {
            if (stages.back() == irony::Stage::report) std::cout << "report: " << p << "\n";
        }
        return kOk;
    } catch (const irony::ConfigError& ex) {
        std::cerr << "error: invalid configuration: " << ex.what() << "\n";
        return kConfigError;
    } catch (const irony::MissingStage& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kMissingStage;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kFailure;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"LLM-augmented irony detection: ingest, augment, train, evaluate, report"};
    app.require_subcommand(1);
    app.fallthrough();
    bool quiet = false;
    app.add_flag("-q,--quiet", quiet, "only log warnings and errors");

    std::string config_path;
    bool dry_run = false;
    struct Command {
        const char* name;
        const char* help;
        std::vector<irony::Stage> stages;
    };
    const std::vector<Command> commands = {
        {"ingest", "load, validate, subsample and split the dataset", {irony::Stage::ingest}},
        {"augment", "rewrite texts with the configured prompt strategies", {irony::Stage::augment}},
        {"train", "fine-tune one classifier per strategy, architecture and seed", {irony::Stage::train}},
        {"evaluate", "score checkpoints on the test split and aggregate over seeds", {irony::Stage::evaluate}},
        {"report", "render the result grid and ranking", {irony::Stage::report}},
        {"run", "run every stage in order", irony::all_stages()},
    };
    std::vector<std::pair<CLI::App*, const Command*>> subs;
    for (const auto& cmd : commands) {
        auto* sub = app.add_subcommand(cmd.name, cmd.help);
        sub->add_option("-c,--config", config_path, "experiment configuration (YAML)")->required()->check(CLI::ExistingFile);
        sub->add_flag("--dry-run", dry_run, "validate and print the plan without writing anything");
        subs.emplace_back(sub, &cmd);
    }
    CLI11_PARSE(app, argc, argv);

    irony::set_log_quiet(quiet || dry_run);
    for (const auto& [sub, cmd] : subs) {
        if (sub->parsed()) return execute(config_path, cmd->stages, dry_run);
    }
    return kFailure;
}

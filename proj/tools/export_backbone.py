#!/usr/bin/env python3
"""Export a pretrained Hugging Face model as a TorchScript backbone.

Writes <out>/backbone.pt and <out>/vocab.txt in the layout the torchscript
backends expect: the module maps (input_ids [B,T], attention_mask [B,T]) to
hidden states [B,T,H]; for encoder-decoder models the output is the decoder
state for a single start token, [B,1,H]. The vocab file holds one token per
line, ordered by id.

    python3 tools/export_backbone.py bert-base-uncased encoder out/bert-base-uncased
    python3 tools/export_backbone.py t5-base encoder_decoder out/t5-base
    python3 tools/export_backbone.py gpt2 decoder out/gpt2
"""

import argparse
import pathlib
import sys

import torch

ARCHITECTURES = ("encoder", "encoder_decoder", "decoder")


class HiddenStates(torch.nn.Module):
    def __init__(self, model):
        super().__init__()
        self.model = model

    def forward(self, input_ids, attention_mask):
        return self.model(input_ids=input_ids, attention_mask=attention_mask, return_dict=False)[0]


class DecoderStart(torch.nn.Module):
    def __init__(self, model, start_id):
        super().__init__()
        self.model = model
        self.start_id = start_id

    def forward(self, input_ids, attention_mask):
        start = input_ids[:, :1] * 0 + self.start_id
        return self.model(
            input_ids=input_ids,
            attention_mask=attention_mask,
            decoder_input_ids=start,
            return_dict=False,
        )[0]


def export_module(model, architecture, path, sequence_length=16):
    """Traces `model` in evaluation mode and saves it to `path`."""
    if architecture not in ARCHITECTURES:
        raise ValueError(f"unknown architecture {architecture!r}")
    model.eval()
    if architecture == "encoder_decoder":
        start_id = model.config.decoder_start_token_id
        if start_id is None:
            raise ValueError("model config has no decoder_start_token_id")
        wrapper = DecoderStart(model, int(start_id))
    else:
        wrapper = HiddenStates(model)
    ids = torch.ones(2, sequence_length, dtype=torch.long)
    mask = torch.ones(2, sequence_length, dtype=torch.long)
    mask[1, sequence_length // 2 :] = 0
    with torch.no_grad():
        traced = torch.jit.trace(wrapper, (ids, mask), check_trace=False, strict=False)
    traced.save(str(path))
    return traced


def write_vocab(tokens_by_id, path):
    """Writes tokens one per line; `tokens_by_id` maps id to token."""
    ids = sorted(tokens_by_id)
    if ids != list(range(len(ids))):
        raise ValueError("vocabulary ids are not contiguous from 0")
    lines = []
    for i in ids:
        token = tokens_by_id[i]
        if "\n" in token or "\r" in token:
            raise ValueError(f"token {i} contains a line break")
        lines.append(token)
    pathlib.Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("model", help="hub name or local directory")
    parser.add_argument("architecture", choices=ARCHITECTURES)
    parser.add_argument("out", type=pathlib.Path, help="output directory")
    args = parser.parse_args(argv)

    from transformers import AutoModel, AutoTokenizer

    args.out.mkdir(parents=True, exist_ok=True)
    tokenizer = AutoTokenizer.from_pretrained(args.model)
    model = AutoModel.from_pretrained(args.model)
    export_module(model, args.architecture, args.out / "backbone.pt")
    write_vocab({i: t for t, i in tokenizer.get_vocab().items()}, args.out / "vocab.txt")
    print(f"wrote {args.out / 'backbone.pt'} and {args.out / 'vocab.txt'} (hidden size {model.config.hidden_size})")
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Backbone construction: pretrained T5 checkpoints or the offline test model.

``tiny-random`` builds a deliberately small randomly-initialized T5 shell
over the byte tokenizer — enough to exercise the full train/predict path on
a laptop CPU in seconds. Any other backbone name is resolved through
``transformers`` and needs the checkpoint to be available locally or
downloadable.
"""

from __future__ import annotations

from .config import TrainConfig
from .data import ByteTokenizer

__all__ = ["TrainerError", "build_model", "generation_fn"]

TINY_RANDOM = "tiny-random"


class TrainerError(RuntimeError):
    pass


def _tiny_t5(seed: int):
    import torch
    from transformers import T5Config, T5ForConditionalGeneration

    torch.manual_seed(seed)
    config = T5Config(
        vocab_size=ByteTokenizer.vocab_size,
        d_model=64,
        d_kv=16,
        d_ff=128,
        num_layers=2,
        num_decoder_layers=2,
        num_heads=4,
        relative_attention_num_buckets=8,
        dropout_rate=0.0,
        pad_token_id=ByteTokenizer.pad_token_id,
        eos_token_id=ByteTokenizer.eos_token_id,
        decoder_start_token_id=ByteTokenizer.pad_token_id,
    )
    return T5ForConditionalGeneration(config)


def build_model(config: TrainConfig):
    """Return ``(tokenizer, model)`` for the configured backbone."""
    name = config.model_name
    if name == TINY_RANDOM:
        return ByteTokenizer(), _tiny_t5(config.seed)
    try:
        from transformers import AutoTokenizer, T5ForConditionalGeneration

        tokenizer = AutoTokenizer.from_pretrained(name)
        model = T5ForConditionalGeneration.from_pretrained(name)
    except Exception as exc:  # noqa: BLE001 — hub errors vary widely
        raise TrainerError(
            "could not load backbone %r (%s); pretrained checkpoints need a local "
            "cache or network access — for an offline smoke run use "
            "--backbone tiny-random" % (name, exc)
        ) from exc
    return tokenizer, model


def generation_fn(tokenizer, model, max_input_tokens: int, max_new_tokens: int):
    """Wrap a model as ``text -> text`` greedy generation, the only interface
    prediction needs."""
    import torch

    device = next(model.parameters()).device

    def generate(text: str) -> str:
        if isinstance(tokenizer, ByteTokenizer):
            ids = tokenizer.encode(text, max_input_tokens)
            input_ids = torch.tensor([ids], dtype=torch.long, device=device)
            attention = torch.ones_like(input_ids)
        else:
            encoded = tokenizer(
                text, return_tensors="pt", truncation=True, max_length=max_input_tokens
            )
            input_ids = encoded["input_ids"].to(device)
            attention = encoded["attention_mask"].to(device)
        with torch.no_grad():
            output = model.generate(
                input_ids=input_ids,
                attention_mask=attention,
                max_new_tokens=max_new_tokens,
                do_sample=False,
                num_beams=1,
            )
        row = output[0].tolist()
        if isinstance(tokenizer, ByteTokenizer):
            return tokenizer.decode(row).strip()
        return tokenizer.decode(row, skip_special_tokens=True).strip()

    return generate

"""Fine-tuning and generation for marker-linearized graph-to-text.

The trainable model is a compact GRU encoder-decoder over a word-level
vocabulary built from the training pairs. Training uses Adam with a
linearly decreasing learning rate, inputs truncated to
512 tokens, batch size 4. Defaults are 3e-5 for the seq2seq path and 5e-4
for the (config-only) autoregressive path; tiny from-scratch runs usually
want a larger rate, which the config accepts explicitly.

Artifacts are a single ``model.pt`` (weights + vocabulary + config) plus a
``manifest.json`` recording the model id, base model label, dataset
selection, and a hash of the configuration.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
import torch
from torch import nn

from .decoding import apply_strategy

PAD, BOS, EOS, UNK = 0, 1, 2, 3
SPECIALS = ("<pad>", "<bos>", "<eos>", "<unk>")


@dataclass(frozen=True)
class FinetuneConfig:
    base_model: str = "gru-seq2seq-small"
    architecture: str = "seq2seq"  # "autoregressive" reserved, lr default 5e-4
    learning_rate: float | None = None
    max_length: int = 512
    batch_size: int = 4
    epochs: int = 1
    dataset: str = "both"
    embed_dim: int = 48
    hidden_dim: int = 96
    seed: int = 0

    def __post_init__(self):
        if self.architecture not in ("seq2seq", "autoregressive"):
            raise ValueError(f"unknown architecture {self.architecture!r}")
        if self.learning_rate is None:
            default = 3e-5 if self.architecture == "seq2seq" else 5e-4
            object.__setattr__(self, "learning_rate", default)
        if self.learning_rate <= 0:
            raise ValueError(f"learning rate must be positive, got {self.learning_rate}")
        if self.max_length < 8:
            raise ValueError(f"max_length too small: {self.max_length}")
        if self.batch_size < 1 or self.epochs < 1:
            raise ValueError("batch_size and epochs must be at least 1")

    def config_hash(self) -> str:
        payload = json.dumps(asdict(self), sort_keys=True).encode("utf-8")
        return hashlib.sha256(payload).hexdigest()[:12]


class Vocab:
    def __init__(self, tokens):
        self.itos = list(SPECIALS) + sorted(set(tokens) - set(SPECIALS))
        self.stoi = {token: i for i, token in enumerate(self.itos)}

    def __len__(self):
        return len(self.itos)

    def encode(self, text: str, max_length: int):
        ids = [self.stoi.get(token, UNK) for token in text.split()]
        return ids[: max_length - 1]

    def decode(self, ids) -> str:
        words = [self.itos[i] for i in ids if i not in (PAD, BOS, EOS)]
        return " ".join(words)


class Seq2Seq(nn.Module):
    def __init__(self, vocab_size: int, embed_dim: int, hidden_dim: int):
        super().__init__()
        self.embed = nn.Embedding(vocab_size, embed_dim, padding_idx=PAD)
        self.encoder = nn.GRU(embed_dim, hidden_dim, batch_first=True)
        self.decoder = nn.GRU(embed_dim, hidden_dim, batch_first=True)
        self.project = nn.Linear(hidden_dim, vocab_size)

    def encode(self, source: torch.Tensor) -> torch.Tensor:
        _, state = self.encoder(self.embed(source))
        return state

    def decode_step(self, token: torch.Tensor, state: torch.Tensor):
        output, state = self.decoder(self.embed(token), state)
        return self.project(output), state

    def forward(self, source: torch.Tensor, target_in: torch.Tensor) -> torch.Tensor:
        state = self.encode(source)
        logits, _ = self.decode_step(target_in, state)
        return logits


def _batches(pairs, vocab, config):
    for start in range(0, len(pairs), config.batch_size):
        chunk = pairs[start : start + config.batch_size]
        sources = [vocab.encode(p.source, config.max_length) for p in chunk]
        targets = [vocab.encode(p.target, config.max_length) for p in chunk]
        max_s = max(len(s) for s in sources)
        max_t = max(len(t) for t in targets) + 1
        src = torch.full((len(chunk), max_s), PAD, dtype=torch.long)
        tgt_in = torch.full((len(chunk), max_t), PAD, dtype=torch.long)
        tgt_out = torch.full((len(chunk), max_t), PAD, dtype=torch.long)
        for row, (s, t) in enumerate(zip(sources, targets)):
            src[row, : len(s)] = torch.tensor(s)
            tgt_in[row, 0] = BOS
            tgt_in[row, 1 : len(t) + 1] = torch.tensor(t)
            tgt_out[row, : len(t)] = torch.tensor(t)
            tgt_out[row, len(t)] = EOS
        yield src, tgt_in, tgt_out


def finetune(dataset, config: FinetuneConfig, out_dir: str | Path) -> dict:
    """Train on prepared pairs and write the model artifact.

    Returns the manifest, which includes the per-step loss log; the smoke
    acceptance compares the first and last logged losses.
    """
    torch.manual_seed(config.seed)
    pairs = dataset.pairs
    if not pairs:
        raise ValueError("dataset has no training pairs")
    tokens = []
    for pair in pairs:
        tokens.extend(pair.source.split())
        tokens.extend(pair.target.split())
    vocab = Vocab(tokens)
    model = Seq2Seq(len(vocab), config.embed_dim, config.hidden_dim)
    optimizer = torch.optim.Adam(model.parameters(), lr=config.learning_rate)
    steps_per_epoch = (len(pairs) + config.batch_size - 1) // config.batch_size
    total_steps = max(1, steps_per_epoch * config.epochs)
    schedule = torch.optim.lr_scheduler.LambdaLR(
        optimizer, lambda step: max(0.0, 1.0 - step / total_steps)
    )
    loss_fn = nn.CrossEntropyLoss(ignore_index=PAD)

    losses = []
    model.train()
    for _ in range(config.epochs):
        for src, tgt_in, tgt_out in _batches(pairs, vocab, config):
            optimizer.zero_grad()
            logits = model(src, tgt_in)
            loss = loss_fn(logits.reshape(-1, len(vocab)), tgt_out.reshape(-1))
            loss.backward()
            optimizer.step()
            schedule.step()
            losses.append(float(loss.item()))

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    torch.save(
        {"state_dict": model.state_dict(), "itos": vocab.itos,
         "config": asdict(config)},
        out_dir / "model.pt",
    )
    manifest = {
        "model_id": f"{config.base_model}-{config.config_hash()}",
        "base_model": config.base_model,
        "architecture": config.architecture,
        "dataset_selection": list(dataset.sources),
        "config_hash": config.config_hash(),
        "records": len(pairs),
        "skipped_records": dataset.skipped,
        "losses": losses,
    }
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return manifest


@dataclass
class GenerationSettings:
    strategy: str = "top_p"
    k: int = 50
    p: float = 0.92
    seed: int = 0
    max_tokens: int = 256


class TrainedModel:
    """A loaded artifact ready to generate text for linearized graphs."""

    def __init__(self, model: Seq2Seq, vocab: Vocab, config: FinetuneConfig,
                 model_id: str):
        self.model = model
        self.vocab = vocab
        self.config = config
        self.model_id = model_id
        self.max_length = config.max_length

    @classmethod
    def load(cls, artifact_dir: str | Path) -> "TrainedModel":
        artifact_dir = Path(artifact_dir)
        payload = torch.load(artifact_dir / "model.pt", weights_only=False)
        config = FinetuneConfig(**payload["config"])
        vocab = Vocab([])
        vocab.itos = payload["itos"]
        vocab.stoi = {token: i for i, token in enumerate(vocab.itos)}
        model = Seq2Seq(len(vocab), config.embed_dim, config.hidden_dim)
        model.load_state_dict(payload["state_dict"])
        model.eval()
        manifest = json.loads(
            (artifact_dir / "manifest.json").read_text(encoding="utf-8")
        )
        return cls(model, vocab, config, manifest["model_id"])

    @torch.no_grad()
    def generate(self, source_text: str, settings: GenerationSettings) -> str:
        generator = torch.Generator().manual_seed(settings.seed)
        ids = self.vocab.encode(source_text, self.max_length)
        source = torch.tensor([ids], dtype=torch.long)
        state = self.model.encode(source)
        token = torch.tensor([[BOS]], dtype=torch.long)
        # structural tokens never surface in narrative text
        banned = [PAD, BOS] + [
            self.vocab.stoi[m] for m in ("<H>", "<R>", "<T>") if m in self.vocab.stoi
        ]
        produced = []
        for _ in range(settings.max_tokens):
            logits, state = self.model.decode_step(token, state)
            probs = torch.softmax(logits[0, -1], dim=-1).numpy().astype(np.float64)
            probs[banned] = 0.0
            probs = probs / probs.sum()
            probs = apply_strategy(probs, settings.strategy, settings.k, settings.p)
            choice = int(
                torch.multinomial(torch.from_numpy(probs), 1, generator=generator)
            )
            if choice == EOS:
                break
            produced.append(choice)
            token = torch.tensor([[choice]], dtype=torch.long)
        text = self.vocab.decode(produced)
        return text if text else "(empty)"

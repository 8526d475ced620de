"""Shared fixtures for the trainer tests."""

from __future__ import annotations

import pytest

from promptlib import smoke_lines, two_turn_lines


@pytest.fixture
def two_turn_prompts(tmp_path):
    path = tmp_path / "two_turn.jsonl"
    path.write_text("\n".join(two_turn_lines()) + "\n", encoding="utf-8")
    return path


@pytest.fixture
def smoke_prompts(tmp_path):
    path = tmp_path / "prompts.jsonl"
    path.write_text("\n".join(smoke_lines()) + "\n", encoding="utf-8")
    return path

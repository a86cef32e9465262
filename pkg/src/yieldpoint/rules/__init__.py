# File: yieldpoint/rules/__init__.py
"""Rewrite rules for quantified await conditions.

Importing a rule module registers its rules; `load_rules()` imports all of
them. The registry lives in `yieldpoint.registry`.
"""
from yieldpoint.rules.base import RewriteRule, QuantBlock, quant_blocks


def load_rules() -> None:
    from yieldpoint.rules import decompose, nested, order, single  # noqa: F401


__all__ = ["RewriteRule", "QuantBlock", "quant_blocks", "load_rules"]

# File: yieldpoint/registry.py

from typing import Callable, Dict, List, Tuple, Type

from yieldpoint.rules.base import RewriteRule


class RuleRegistry:
    """
    Singleton registry mapping rule keys to:
      (description, rule_class)
    plus a category tag per key (single, nested, order, decompose).
    Keys keep their registration order, which is also the order in which
    the planner tries alternatives.
    """
    _instance = None

    _registry: Dict[str, Tuple[str, Type[RewriteRule]]]
    _categories: Dict[str, str]

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super(RuleRegistry, cls).__new__(cls)
            cls._instance._registry = {}
            cls._instance._categories = {}
        return cls._instance

    def register(self, key: str, description: str, rule_class: Type) -> None:
        """
        Register a rule class under `key` and stamp the key and description
        onto the class so instances can report which rule produced a result.
        """
        if not (isinstance(rule_class, type) and issubclass(rule_class, RewriteRule)):
            raise TypeError(f"Rule class '{getattr(rule_class, '__name__', rule_class)}' must inherit from RewriteRule.")
        if key in self._registry:
            raise KeyError(f"Rule key '{key}' is already registered.")
        self._registry[key] = (description, rule_class)
        rule_class.key = key
        rule_class.description = description

    def unregister(self, key: str) -> None:
        """Drop a key; used by tests that register throwaway rules."""
        self._registry.pop(key, None)
        self._categories.pop(key, None)

    def get_rule_for_key(self, key: str) -> Type[RewriteRule]:
        """Return the rule class for a given key."""
        try:
            return self._registry[key][1]
        except KeyError:
            raise KeyError(f"Rule key '{key}' is not registered.")

    def get_description_for_key(self, key: str) -> str:
        """Return the description for a given key."""
        try:
            return self._registry[key][0]
        except KeyError:
            raise KeyError(f"Rule key '{key}' is not registered.")

    def assign_category(self, key: str, category: str) -> None:
        """Tag a registered rule with a category (e.g. 'single', 'order')."""
        if key not in self._registry:
            raise KeyError(f"Rule key '{key}' is not registered.")
        self._categories[key] = category

    def rules_in_category(self, category: str) -> List[str]:
        """Return all rule keys tagged with `category`, in registration order."""
        return [k for k in self._registry if self._categories.get(k) == category]

    def all_registered_rules(self) -> Dict[str, str]:
        """Return a dict mapping rule key -> description."""
        return {k: desc for k, (desc, _) in self._registry.items()}


# Module-level convenience functions and registry instance

_registry = RuleRegistry()


def register_rule(
    key: str,
    description: str,
    *,
    category: str = "default"
) -> Callable:
    """
    Register a rule class under `key`, with a human description *and* a category tag.
    """
    def decorator(cls):
        _registry.register(key, description, cls)
        _registry.assign_category(key, category)
        return cls
    return decorator


def get_rule_for_key(key: str) -> Type[RewriteRule]:
    return _registry.get_rule_for_key(key)


def rules_in_category(category: str) -> List[str]:
    return _registry.rules_in_category(category)


def all_registered_rules() -> Dict[str, str]:
    return _registry.all_registered_rules()


if __name__ == "__main__":
    @register_rule("test.a", "A desc", category="unit")
    class DummyRuleA(RewriteRule):
        pass

    @register_rule("test.b", "B desc", category="unit")
    class DummyRuleB(RewriteRule):
        pass

    assert "test.a" in all_registered_rules()
    assert rules_in_category("unit") == ["test.a", "test.b"]
    assert DummyRuleA.key == "test.a"

    try:
        register_rule("test.a", "again", category="unit")(DummyRuleB)
    except KeyError as e:
        print("Caught expected KeyError for duplicate key:", e)
    else:
        raise RuntimeError("duplicate registration should have raised KeyError")

    try:
        register_rule("test.c", "not a rule")(object)
    except TypeError as e:
        print("Caught expected TypeError for non-rule class:", e)
    else:
        raise RuntimeError("registering a non-rule should have raised TypeError")

    _registry.unregister("test.a")
    _registry.unregister("test.b")
    print("Self-test passed.")

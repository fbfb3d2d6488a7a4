"""Tests for deep merge and flag overrides."""

from gpderain.models.merger import merge_configs, overrides_from_flags


class TestMergeConfigs:
    """Tests for merge_configs function."""

    def test_scalar_override(self):
        """Test that child scalars override parent."""
        parent = {"train": {"lr": 2e-4}}
        child = {"train": {"lr": 1e-3}}
        assert merge_configs(parent, child)["train"]["lr"] == 1e-3

    def test_dict_deep_merge(self):
        """Test deep merge of nested blocks."""
        parent = {"synth": {"source": {"name": "source", "rain": {"density": 8.0, "seed": 1}}}}
        child = {"synth": {"source": {"rain": {"density": 4.0}}}}
        result = merge_configs(parent, child)
        assert result["synth"]["source"]["name"] == "source"
        assert result["synth"]["source"]["rain"] == {"density": 4.0, "seed": 1}

    def test_lists_are_replaced(self):
        parent = {"model": {"tags": ["a", "b"]}}
        child = {"model": {"tags": ["c"]}}
        assert merge_configs(parent, child)["model"]["tags"] == ["c"]

    def test_missing_keys_inherited(self):
        """Test that keys absent in the child come from the parent."""
        result = merge_configs({"name": "base", "train": {"epochs": 5}}, {"name": "child"})
        assert result == {"name": "child", "train": {"epochs": 5}}

    def test_parent_not_mutated(self):
        parent = {"train": {"lr": 1.0}}
        merge_configs(parent, {"train": {"lr": 2.0}})
        assert parent == {"train": {"lr": 1.0}}


class TestOverridesFromFlags:
    """Tests for overrides_from_flags function."""

    def test_dotted_keys_nest(self):
        result = overrides_from_flags(**{"train.seed": 3, "train.gp_mode": "off", "name": "x"})
        assert result == {"train": {"seed": 3, "gp_mode": "off"}, "name": "x"}

    def test_unset_flags_skipped(self):
        """Test that None values leave the config untouched."""
        assert overrides_from_flags(**{"train.kernel": None}) == {}

    def test_falsy_values_kept(self):
        result = overrides_from_flags(**{"train.lambda_unsup": 0.0, "train.unlabeled_ratio": 0})
        assert result == {"train": {"lambda_unsup": 0.0, "unlabeled_ratio": 0}}

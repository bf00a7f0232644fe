"""scikit-learn style front-end to the preprocessor."""

from __future__ import annotations

from typing import List, Optional

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .core import Formula
from .pipeline import DEFAULT_TECHNIQUES, PipelineConfig, preprocess
from .reconstruct import extend_model
from .validation import check_formula, check_model_input, check_variables


class Coprocessor(TransformerMixin, BaseEstimator, auto_wrap_output_keys=None):
    """CNF preprocessor with model reconstruction.

    Output is a list of clauses, not an array, so sklearn's ``set_output``
    wrapping is switched off.

    ``fit`` simplifies a formula and keeps the undo information;
    ``transform`` returns the simplified clauses and ``inverse_transform``
    turns a model of them back into a model of the input.

    Parameters
    ----------
    techniques : iterable of str, default all but ``"er"``
        Any of subsume, ee, hte, probe, vivify, ve, bce, er.
    loop_limit : int, default 5
    whitelist, blacklist : iterable of int, optional
        Variables protected from / forced through elimination.
    compress : bool, default False
        Renumber the remaining variables densely.
    er_max_definitions, er_min_pair : int
    probe_budget : int

    Attributes
    ----------
    formula_ : Formula or None
        Preprocessed formula, None if the input is unsatisfiable.
    map_file_ : MapFile
    stats_ : PipelineStats
    unsat_ : bool
    """

    def __init__(
        self,
        techniques=tuple(sorted(DEFAULT_TECHNIQUES)),
        loop_limit: int = 5,
        whitelist=None,
        blacklist=None,
        compress: bool = False,
        er_max_definitions: int = 0,
        er_min_pair: int = 4,
        probe_budget: int = 200_000,
    ):
        self.techniques = techniques
        self.loop_limit = loop_limit
        self.whitelist = whitelist
        self.blacklist = blacklist
        self.compress = compress
        self.er_max_definitions = er_max_definitions
        self.er_min_pair = er_min_pair
        self.probe_budget = probe_budget

    def _config(self) -> PipelineConfig:
        return PipelineConfig(
            techniques=frozenset(self.techniques),
            loop_limit=self.loop_limit,
            whitelist=check_variables(self.whitelist, "whitelist"),
            blacklist=check_variables(self.blacklist, "blacklist"),
            compress_output=self.compress,
            er_max_definitions=self.er_max_definitions,
            er_min_pair=self.er_min_pair,
            probe_budget=self.probe_budget,
        )

    def fit(self, X, y=None):
        f = check_formula(X)
        result = preprocess(f, self._config())
        self.input_clauses_ = sorted(f.active_clauses())
        self.n_variables_in_ = f.num_variables
        self.formula_ = result.formula
        self.map_file_ = result.map_file
        self.stats_ = result.stats
        self.unsat_ = result.unsat
        return self

    def transform(self, X=None) -> List[List[int]]:
        """Clauses of the preprocessed formula (``[[]]`` when unsatisfiable).

        ``X`` may be omitted; if given it must be the fitted formula.
        """
        check_is_fitted(self, "map_file_")
        if X is not None and sorted(check_formula(X).active_clauses()) != self.input_clauses_:
            raise ValueError("Coprocessor was fitted on a different formula; call fit first")
        if self.formula_ is None:
            return [[]]
        return [list(c) for c in self.formula_.active_clauses()]

    def inverse_transform(self, model) -> List[int]:
        """Extend a model of the preprocessed formula to one of the input."""
        check_is_fitted(self, "map_file_")
        if self.unsat_:
            raise ValueError("the fitted formula is unsatisfiable; there is no model to extend")
        return extend_model(check_model_input(model), self.map_file_)

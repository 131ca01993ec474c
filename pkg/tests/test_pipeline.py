"""Tests for the predict-then-optimize pipeline and multilinear utilities."""

from __future__ import annotations

import json

import numpy as np
import pytest

from cograd.gnn import TrainConfig, project_and_repair, train
from cograd.graph import Graph, generate_erdos_renyi, sample_observed_subgraph
from cograd.linkpred import predict_adjacency, train_predictor
from cograd.pipeline import (
    CoverageModel,
    PipelineConfig,
    combined_loss,
    coverage_multilinear_grads,
    end_to_end_solve,
    multilinear_value,
    soft_adjacency_graph,
)
from cograd.qubo import ProblemKind, build_qubo, eval_hamiltonian

_FAST_PRED = TrainConfig(seed=1, max_epochs=60, patience=60)
_FAST_SOLVE = TrainConfig(seed=3, max_epochs=600, patience=600)


def _cfg(kind, **kw):
    base = dict(
        kind=kind,
        observe_fraction=1.0,
        predictor_cfg=_FAST_PRED,
        solver_cfg=_FAST_SOLVE,
    )
    base.update(kw)
    return PipelineConfig(**base)


def test_config_validation():
    with pytest.raises(ValueError, match="observe_fraction"):
        PipelineConfig(kind=ProblemKind.MAXCUT, observe_fraction=0.0)
    with pytest.raises(ValueError, match="observe_fraction"):
        PipelineConfig(kind=ProblemKind.MAXCUT, observe_fraction=1.2)
    with pytest.raises(ValueError, match="nonnegative"):
        PipelineConfig(kind=ProblemKind.MAXCUT, lam=-0.5)


def test_coverage_model_validation():
    with pytest.raises(ValueError, match="2-d"):
        CoverageModel(np.array([0.5, 0.5]))
    with pytest.raises(ValueError, match="0, 1"):
        CoverageModel(np.array([[0.5, 1.5]]))
    with pytest.raises(ValueError, match="0, 1"):
        CoverageModel(np.array([[-0.1, 0.5]]))


def test_reduction_identity_bit_exact():
    # full observation at lam = 0 must reproduce the standalone solver
    for inst in range(2):
        g = generate_erdos_renyi(10, 0.4, seed=700 + inst)
        for kind in ProblemKind:
            res = end_to_end_solve(g, _cfg(kind, lam=0.0, seed=inst))
            q = build_qubo(kind, g)
            soft, _ = train(g, q, _FAST_SOLVE)
            alone = project_and_repair(kind, g, soft, polish=True)
            assert np.array_equal(res.assignment, alone)


def test_k4_maxcut_full_observation():
    k4 = Graph(4, [(i, j) for i in range(4) for j in range(i + 1, 4)])
    res = end_to_end_solve(k4, _cfg(ProblemKind.MAXCUT))
    assert res.objective_true == 4.0
    assert res.feasible_true


def test_path_mvc_full_observation():
    path = Graph(3, [(0, 1), (1, 2)])
    res = end_to_end_solve(path, _cfg(ProblemKind.MVC))
    assert res.objective_true == 1.0
    assert list(res.assignment) == [0, 1, 0]


def test_repaired_decision_feasible_on_true_graph():
    # feasibility must hold on the executed graph even when the predictor
    # saw only part of it
    for inst, kind in enumerate([ProblemKind.MIS, ProblemKind.MVC]):
        g = generate_erdos_renyi(14, 0.3, seed=40 + inst)
        res = end_to_end_solve(g, _cfg(kind, observe_fraction=0.6, seed=inst))
        assert res.feasible_true
        assert res.n == 14 and res.m == g.m
        assert res.runtime_ms > 0.0


def test_result_json_schema():
    path = Graph(3, [(0, 1), (1, 2)])
    res = end_to_end_solve(path, _cfg(ProblemKind.MVC))
    doc = json.loads(res.to_json())
    assert list(doc) == [
        "problem",
        "n",
        "m",
        "observe_fraction",
        "lambda",
        "seed",
        "objective_true",
        "objective_predicted",
        "feasible_true",
        "runtime_ms",
        "h_qubo",
        "l_obj",
        "combined_loss",
    ]
    assert doc["problem"] == "mvc"
    assert doc["lambda"] == 1.0
    assert isinstance(doc["feasible_true"], bool)


def test_combined_loss_fields_consistent():
    g = generate_erdos_renyi(12, 0.3, seed=9)
    res = end_to_end_solve(
        g, _cfg(ProblemKind.MAXCUT, observe_fraction=0.7, lam=2.5)
    )
    assert res.l_obj > 0.0
    assert res.combined_loss == pytest.approx(res.h_qubo + 2.5 * res.l_obj)


def test_combined_loss_function():
    g = Graph(2, [(0, 1)])
    q = build_qubo(ProblemKind.MAXCUT, g)
    p = np.array([0.25, 0.75])
    h = eval_hamiltonian(q, p)
    assert combined_loss(p, q, 0.4, 2.0) == pytest.approx(h + 0.8)
    assert combined_loss(p, q, 0.4, 0.0) == pytest.approx(h)
    with pytest.raises(ValueError, match="nonnegative"):
        combined_loss(p, q, 0.4, -1.0)


def test_soft_adjacency_graph_cutoff():
    probs = np.zeros((3, 3))
    probs[0, 1] = probs[1, 0] = 0.9
    probs[1, 2] = probs[2, 1] = 1e-4  # below cutoff, dropped
    from cograd.linkpred import SoftAdjacency

    g = soft_adjacency_graph(SoftAdjacency(probs))
    assert g.m == 1
    u, v, w = g.edges[0]
    assert (u, v) == (0, 1) and w == 0.9


def test_multilinear_binary_corners_exact():
    rng = np.random.default_rng(5)
    values = {(): 0.0}
    for mask in range(1, 16):
        values[tuple(i for i in range(4) if (mask >> i) & 1)] = float(
            rng.normal()
        )
    f = lambda s: values[s]
    for mask in range(16):
        x = np.array([(mask >> i) & 1 for i in range(4)], dtype=float)
        subset = tuple(i for i in range(4) if (mask >> i) & 1)
        assert multilinear_value(f, x) == pytest.approx(values[subset])


def test_multilinear_single_edge_cut_half():
    # one edge, both endpoints at probability one half: expected cut is 1/2
    f = lambda s: 1.0 if len(s) == 1 else 0.0
    assert multilinear_value(f, [0.5, 0.5]) == pytest.approx(0.5)


def test_multilinear_matches_coverage_closed_form():
    rng = np.random.default_rng(11)
    theta = rng.uniform(0.05, 0.95, size=(5, 3))

    def f_cov(s):
        if not s:
            return 0.0
        return float(np.sum(1.0 - np.prod(1.0 - theta[list(s), :], axis=0)))

    x = rng.uniform(0.0, 1.0, size=5)
    closed = float(np.sum(1.0 - np.prod(1.0 - x[:, None] * theta, axis=0)))
    assert multilinear_value(f_cov, x) == pytest.approx(closed, abs=1e-12)


def test_multilinear_validation():
    f = lambda s: float(len(s))
    with pytest.raises(ValueError, match="16"):
        multilinear_value(f, np.full(17, 0.5))
    with pytest.raises(ValueError, match="0, 1"):
        multilinear_value(f, [0.5, 1.5])
    with pytest.raises(ValueError, match="normalized"):
        multilinear_value(lambda s: 1.0, [0.5])


def test_coverage_grads_single_item_single_target():
    model = CoverageModel(np.array([[0.7]]))
    gx, tensor = coverage_multilinear_grads([0.4], model)
    assert gx[0] == pytest.approx(0.7)
    assert tensor[0, 0, 0] == pytest.approx(1.0)


def test_coverage_grads_cross_term():
    theta = np.array([[0.6], [0.3]])
    x = np.array([0.2, 0.5])
    gx, tensor = coverage_multilinear_grads(x, CoverageModel(theta))
    assert gx[0] == pytest.approx(0.6 * (1.0 - 0.5 * 0.3))
    assert tensor[0, 1, 0] == pytest.approx(-0.6 * 0.5)
    assert tensor[1, 0, 0] == pytest.approx(-0.3 * 0.2)


def test_coverage_grads_match_finite_differences():
    rng = np.random.default_rng(21)
    h = 1e-6
    for _ in range(5):
        n = int(rng.integers(2, 6))
        t = int(rng.integers(1, 5))
        theta = rng.uniform(0.05, 0.95, size=(n, t))
        x = rng.uniform(0.05, 0.95, size=n)
        gx, tensor = coverage_multilinear_grads(x, CoverageModel(theta))

        def closed(xv, th):
            return float(np.sum(1.0 - np.prod(1.0 - xv[:, None] * th, axis=0)))

        for i in range(n):
            xp, xm = x.copy(), x.copy()
            xp[i] += h
            xm[i] -= h
            fd = (closed(xp, theta) - closed(xm, theta)) / (2 * h)
            assert abs(fd - gx[i]) < 1e-6
        for k in range(n):
            for j in range(t):
                tp, tm = theta.copy(), theta.copy()
                tp[k, j] += h
                tm[k, j] -= h
                gp, _ = coverage_multilinear_grads(x, CoverageModel(tp))
                gm, _ = coverage_multilinear_grads(x, CoverageModel(tm))
                fd = (gp - gm) / (2 * h)
                assert np.max(np.abs(fd - tensor[:, k, j])) < 1e-6


def test_coverage_grads_shape_mismatch():
    with pytest.raises(ValueError, match="items"):
        coverage_multilinear_grads([0.5], CoverageModel(np.full((2, 2), 0.5)))


def test_predictor_perturbation_barely_moves_solver_loss():
    # tiny predictor perturbations must not jolt the relaxed energy the
    # solver descends, otherwise the composed objective is not smooth
    g = generate_erdos_renyi(12, 0.35, seed=17)
    sample = sample_observed_subgraph(g, 0.8, seed=0)
    params = train_predictor(sample, g.n, _FAST_PRED)
    q = build_qubo(ProblemKind.MAXCUT, soft_adjacency_graph(predict_adjacency(params, sample)))
    soft, _ = train(g, q, _FAST_SOLVE)
    p = np.asarray(soft)
    base = eval_hamiltonian(q, p)
    rng = np.random.default_rng(1)
    params.embed += rng.uniform(-1e-6, 1e-6, size=params.embed.shape)
    params.w += rng.uniform(-1e-6, 1e-6, size=params.w.shape)
    q2 = build_qubo(
        ProblemKind.MAXCUT, soft_adjacency_graph(predict_adjacency(params, sample))
    )
    assert abs(eval_hamiltonian(q2, p) - base) <= 1e-3

//! Checks against independent brute-force and dense reference computations.

mod common;

use approx::assert_abs_diff_eq;
use common::*;
use lerp::classifier::{
    Classifier, TrainConfig, TrainingSet, adam_step, ce_loss_curriculum, ce_loss_labeled, cross_entropy, loss_and_grad,
    train,
};
use lerp::embeddings::{LabelMatrix, argmax_rows, one_hot, sharpen};
use lerp::graph::{KnnWeighting, hop_aggregate, hop_distances, knn_graph};
use lerp::propagation::{
    PropagationParams, RegularizerWeights, full_variational_iterate, full_variational_iterate_with,
    general_closed_form, lerp_inner_iterate, lerp_inner_iterate_with, lp_closed_form, lp_iterate,
};
use lerp::solver::{Averaging, CurriculumSet, Ensemble, cost_eval, grow_curriculum};
use ndarray::{Array1, Array2, Axis, array, concatenate};
use rand::Rng;

// ---------------------------------------------------------------- graph

#[test]
fn normalized_view_matches_dense_construction() {
    let mut r = rng(1);
    for _ in 0..10 {
        let g = weighted_erdos_renyi(15, 0.3, &mut r);
        let view = g.normalize_random_walk();
        assert!(max_abs(&view.to_dense(), &dense_random_walk(&g)) < 1e-15);
    }
}

#[test]
fn hop_aggregate_matches_dense_powers() {
    let mut r = rng(2);
    let g = weighted_erdos_renyi(10, 0.4, &mut r);
    let a = dense_random_walk(&g);
    let s = gaussian(10, 3, &mut r);
    let stack = hop_aggregate(&g.normalize_random_walk(), s.view(), 2).unwrap();
    let expected = concatenate![Axis(1), s, a.dot(&s), a.dot(&a).dot(&s)];
    assert!(max_abs(&stack.as_matrix().to_owned(), &expected) < 1e-12);
}

#[test]
fn laplacian_spectrum_lies_in_zero_two() {
    // Ã is similar to D^{-1/2} A D^{-1/2}; power iteration bounds its
    // spectral radius by 1, so eig(L̃) = 1 − eig(Ã) ⊂ [0, 2].
    let mut r = rng(3);
    for _ in 0..5 {
        let g = connected_erdos_renyi(20, 0.25, &mut r);
        let mut sym = Array2::<f64>::zeros((20, 20));
        for (u, v, w) in g.edges() {
            let s = w / (g.degree()[u] * g.degree()[v]).sqrt();
            sym[[u, v]] = s;
            sym[[v, u]] = s;
        }
        let mut x = Array1::from_shape_fn(20, |_| r.random::<f64>() - 0.5);
        let mut rho = 0.0;
        for _ in 0..2000 {
            let y = sym.dot(&x);
            rho = y.dot(&y).sqrt() / x.dot(&x).sqrt();
            x = &y / y.dot(&y).sqrt();
        }
        assert!(rho <= 1.0 + 1e-9, "spectral radius {rho}");
    }
}

#[test]
fn laplacian_quadratic_matches_dense_trace() {
    let mut r = rng(4);
    for _ in 0..10 {
        let g = weighted_erdos_renyi(12, 0.3, &mut r);
        let view = g.normalize_random_walk();
        let f = gaussian(12, 3, &mut r);
        let lap = view.laplacian_dense();
        let dense = f.t().dot(&lap).dot(&f).diag().sum();
        assert_abs_diff_eq!(view.laplacian_quadratic(f.view()).unwrap(), dense, epsilon = 1e-10);
    }
}

#[test]
fn bfs_matches_floyd_warshall() {
    let mut r = rng(5);
    for trial in 0..10 {
        let g = erdos_renyi(30, 0.08, &mut r);
        let all = floyd_warshall(&g);
        let k = 1 + trial % 3;
        let sources: Vec<usize> = (0..k).map(|_| r.random_range(0..30)).collect();
        let d = hop_distances(&g, &sources).unwrap();
        for v in 0..30 {
            let oracle = sources.iter().filter_map(|&s| all[s][v]).min();
            assert_eq!(d[v], oracle, "node {v}");
        }
    }
}

#[test]
fn knn_matches_exhaustive_sort() {
    let mut r = rng(6);
    for _ in 0..5 {
        let pts = gaussian(20, 2, &mut r);
        let k = 3;
        let g = knn_graph(pts.view(), k, KnnWeighting::Unit).unwrap();
        let mut expected = std::collections::BTreeSet::new();
        for i in 0..20 {
            let mut order: Vec<(f64, usize)> = (0..20)
                .filter(|&j| j != i)
                .map(|j| {
                    let d = &pts.row(i) - &pts.row(j);
                    (d.dot(&d), j)
                })
                .collect();
            order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            for &(_, j) in &order[..k] {
                expected.insert((i.min(j), i.max(j)));
            }
        }
        let got: std::collections::BTreeSet<_> = g.edges().map(|(u, v, _)| (u, v)).collect();
        assert_eq!(got, expected);
    }
}

// ----------------------------------------------------------- classifier

fn naive_ce(w: &Array2<f64>, x: &Array2<f64>, labels: &[usize]) -> f64 {
    let p = w.ncols() - 1;
    let mut total = 0.0;
    for (i, &y) in labels.iter().enumerate() {
        let z: Vec<f64> = (0..w.nrows())
            .map(|c| (0..p).map(|k| w[[c, k]] * x[[i, k]]).sum::<f64>() + w[[c, p]])
            .collect();
        let denom: f64 = z.iter().map(|v| v.exp()).sum();
        total -= (z[y].exp() / denom).ln();
    }
    total / labels.len() as f64
}

#[test]
fn labeled_loss_matches_naive_formula() {
    let mut r = rng(7);
    for _ in 0..20 {
        let x = gaussian(8, 4, &mut r);
        let w = gaussian(3, 5, &mut r);
        let labels: Vec<usize> = (0..8).map(|_| r.random_range(0..3)).collect();
        let truth = one_hot(&labels, 3).unwrap();
        let got = ce_loss_labeled(&w, x.view(), &truth).unwrap();
        assert_abs_diff_eq!(got, naive_ce(&w, &x, &labels), epsilon = 1e-8);
    }
}

#[test]
fn curriculum_loss_matches_term_by_term_sum() {
    let mut r = rng(8);
    let x = gaussian(4, 3, &mut r);
    let w = gaussian(2, 4, &mut r);
    let f = LabelMatrix::try_new(array![[0.9, 0.1], [0.3, 0.7], [0.6, 0.4], [0.5, 0.5]]).unwrap();
    let truth = one_hot(&[0], 2).unwrap();
    let got = ce_loss_curriculum(&w, x.view(), &[0], &truth, &f, &[1, 2], 1.0, 1.0).unwrap();

    let log_p = |i: usize, c: usize| {
        let z: Vec<f64> = (0..2)
            .map(|k| (0..3).map(|j| w[[k, j]] * x[[i, j]]).sum::<f64>() + w[[k, 3]])
            .collect();
        z[c] - z.iter().map(|v| v.exp()).sum::<f64>().ln()
    };
    let oracle = -log_p(0, 0)
        - (0.3 * log_p(1, 0) + 0.7 * log_p(1, 1))
        - (0.6 * log_p(2, 0) + 0.4 * log_p(2, 1));
    assert_abs_diff_eq!(got, oracle, epsilon = 1e-10);
}

fn assert_grad_matches_fd(set: &TrainingSet, w: &Array2<f64>, weight_decay: f64) {
    let objective = |w: &Array2<f64>| cross_entropy(w, set).unwrap() + 0.5 * weight_decay * w.iter().map(|v| v * v).sum::<f64>();
    let (_, g) = loss_and_grad(w, set, weight_decay).unwrap();
    let h = 1e-6;
    let mut fd = Array2::zeros(w.dim());
    for idx in ndarray::indices(w.dim()) {
        let mut plus = w.clone();
        let mut minus = w.clone();
        plus[idx] += h;
        minus[idx] -= h;
        fd[idx] = (objective(&plus) - objective(&minus)) / (2.0 * h);
    }
    let diff = (&g - &fd).mapv(|v| v * v).sum().sqrt();
    let scale = g.mapv(|v| v * v).sum().sqrt().max(fd.mapv(|v| v * v).sum().sqrt()).max(1e-12);
    assert!(diff / scale < 1e-5, "relative error {}", diff / scale);
}

#[test]
fn gradients_match_central_differences() {
    let mut r = rng(9);
    for trial in 0..5 {
        let n = 12;
        let x = gaussian(n, 4, &mut r);
        let w = gaussian(3, 5, &mut r) * 0.5;
        let labeled = vec![0, 1, 2];
        let truth = one_hot(&[0, 1, 2], 3).unwrap();
        let f = random_stochastic(n, 3, 1.0, &mut r);
        let t = [0.5, 1.0, 2.0][trial % 3];

        // supervised mean loss
        let sup = TrainingSet::supervised(x.select(Axis(0), &labeled).view(), &truth).unwrap();
        assert_grad_matches_fd(&sup, &w, 0.0);
        assert_grad_matches_fd(&sup, &w, 5e-5);

        // every unlabeled node as a pseudo-labeled sample
        let unlabeled: Vec<usize> = (3..n).collect();
        let all = TrainingSet::curriculum(x.view(), &labeled, &truth, &f, &unlabeled, 0.7, t).unwrap();
        assert_grad_matches_fd(&all, &w, 5e-5);

        // curriculum subset
        let cur = TrainingSet::curriculum(x.view(), &labeled, &truth, &f, &[4, 7, 9], 2.0, t).unwrap();
        assert_grad_matches_fd(&cur, &w, 5e-5);
    }
}

#[test]
fn adam_matches_reference_trace_on_quadratic_bowl() {
    let curvature = array![[1.0, 2.0, 0.5], [3.0, 0.2, 1.5]];
    let target = array![[0.3, -1.0, 2.0], [0.0, 0.5, -0.7]];
    let cfg = TrainConfig::default();
    let mut cls = Classifier::from_weights(Array2::zeros((2, 3)));

    let mut w = Array2::<f64>::zeros((2, 3));
    let mut m = Array2::<f64>::zeros((2, 3));
    let mut v = Array2::<f64>::zeros((2, 3));
    for step in 1..=5 {
        let g = &curvature * &(cls.weights() - &target);
        adam_step(&mut cls, &g, &cfg).unwrap();

        let g_ref = &curvature * &(&w - &target);
        m = &m * 0.9 + &g_ref * 0.1;
        v = &v * 0.999 + &g_ref.mapv(|x| x * x) * 0.001;
        let m_hat = &m / (1.0 - 0.9f64.powi(step));
        let v_hat = &v / (1.0 - 0.999f64.powi(step));
        w = &w - &(m_hat / (v_hat.mapv(f64::sqrt) + 1e-8) * 0.01);
        assert!(max_abs(cls.weights(), &w) < 1e-10, "step {step}");
    }
    assert_eq!(cls.adam().step, 5);
}

#[test]
fn separable_toy_is_fit_within_200_epochs() {
    let x = array![[2.0, 1.0], [1.5, 2.0], [3.0, 0.5], [-2.0, -1.0], [-1.0, -2.5], [-3.0, 0.0]];
    let truth = one_hot(&[0, 0, 0, 1, 1, 1], 2).unwrap();
    let set = TrainingSet::supervised(x.view(), &truth).unwrap();
    let cfg = TrainConfig {
        max_epochs: 200,
        patience: 200,
        ..Default::default()
    };
    let mut cls = Classifier::zeros(2, 2);
    train(&mut cls, &set, None, &cfg, &mut rng(0)).unwrap();
    let pred = argmax_rows(cls.predict(x.view()).unwrap().view());
    assert_eq!(pred, vec![0, 0, 0, 1, 1, 1]);
}

#[test]
fn batch_of_full_size_equals_full_batch() {
    let mut r = rng(10);
    let x = gaussian(20, 3, &mut r);
    let labels: Vec<usize> = (0..20).map(|i| i % 3).collect();
    let set = TrainingSet::supervised(x.view(), &one_hot(&labels, 3).unwrap()).unwrap();
    let run = |batch_size| {
        let cfg = TrainConfig {
            batch_size,
            max_epochs: 50,
            ..Default::default()
        };
        let mut cls = Classifier::zeros(3, 3);
        let report = train(&mut cls, &set, None, &cfg, &mut rng(3)).unwrap();
        (report.history, cls)
    };
    assert_eq!(run(0), run(20));
}

#[test]
fn decay_free_training_has_monotone_best_loss() {
    let mut r = rng(11);
    let x = gaussian(30, 4, &mut r);
    let labels: Vec<usize> = (0..30).map(|_| r.random_range(0..3)).collect();
    let set = TrainingSet::supervised(x.view(), &one_hot(&labels, 3).unwrap()).unwrap();
    let cfg = TrainConfig {
        weight_decay: 0.0,
        max_epochs: 100,
        batch_size: 8,
        ..Default::default()
    };
    let report = train(&mut Classifier::zeros(3, 4), &set, None, &cfg, &mut rng(1)).unwrap();
    let mut best = f64::INFINITY;
    for e in &report.history {
        let next = best.min(e.train_loss);
        assert!(next <= best);
        best = next;
    }
    assert!(best < report.history[0].train_loss);
}

// ---------------------------------------------------------- propagation

#[test]
fn lp_closed_form_matches_dense_inverse() {
    let mut r = rng(12);
    for _ in 0..5 {
        let g = connected_erdos_renyi(25, 0.2, &mut r);
        let a = dense_random_walk(&g);
        let y = gaussian(25, 3, &mut r).mapv(f64::abs);
        let alpha = 0.8;
        let oracle = dense_inverse(&(Array2::eye(25) - &a * alpha)).dot(&y) * (1.0 - alpha);
        let got = lp_closed_form(&g.normalize_random_walk(), y.view(), alpha).unwrap();
        assert!(max_abs(&got, &oracle) < 1e-10);
    }
}

#[test]
fn lp_iterate_converges_to_closed_form_on_30_nodes() {
    let mut r = rng(13);
    for _ in 0..5 {
        let g = connected_erdos_renyi(30, 0.15, &mut r);
        let view = g.normalize_random_walk();
        let mut y = Array2::zeros((30, 3));
        for i in 0..6 {
            y[[i * 5, i % 3]] = 1.0;
        }
        let params = PropagationParams {
            alpha_lp: 0.9,
            max_iter: 100_000,
            tol: 1e-14,
            ..Default::default()
        };
        let iterated = lp_iterate(&view, y.view(), &params).unwrap();
        let closed = lp_closed_form(&view, y.view(), 0.9).unwrap();
        assert!(max_abs(&iterated, &closed) < 1e-8);
    }
}

#[test]
fn lp_closed_form_keeps_stochastic_rows() {
    let mut r = rng(14);
    let g = connected_erdos_renyi(20, 0.2, &mut r);
    let y = random_stochastic(20, 4, 1.0, &mut r);
    let out = lp_closed_form(&g.normalize_random_walk(), y.view(), 0.7).unwrap();
    assert!(simplex_error(&out) < 1e-9);
}

#[test]
fn inner_iterate_reaches_dense_fixed_point() {
    let mut r = rng(15);
    let g = connected_erdos_renyi(40, 0.12, &mut r);
    let a = dense_random_walk(&g);
    let beta = 0.6;
    let f_init = random_stochastic(40, 3, 2.0, &mut r);
    let start = random_stochastic(40, 3, 2.0, &mut r);
    let params = PropagationParams {
        beta,
        max_iter: 500,
        tol: 0.0,
        ..Default::default()
    };
    let got = lerp_inner_iterate(&g.normalize_random_walk(), &start, &f_init, &params).unwrap();
    let oracle = dense_inverse(&(Array2::eye(40) - &a * beta)).dot(&f_init.view()) * (1.0 - beta);
    assert!(max_abs(&got.into_inner(), &oracle) < 1e-8);
}

#[test]
fn inner_iterate_contracts_towards_fixed_point() {
    let mut r = rng(16);
    let g = connected_erdos_renyi(30, 0.15, &mut r);
    let view = g.normalize_random_walk();
    let beta = 0.5;
    let f_init = random_stochastic(30, 4, 1.5, &mut r);
    let start = random_stochastic(30, 4, 1.5, &mut r);
    let fixed = lp_closed_form(&view, f_init.view(), beta).unwrap();
    let params = PropagationParams {
        beta,
        max_iter: 40,
        tol: 0.0,
        ..Default::default()
    };
    let mut prev = max_abs(&start.view().to_owned(), &fixed);
    lerp_inner_iterate_with(&view, &start, &f_init, &params, None, |_, f| {
        let err = max_abs(f, &fixed);
        assert!(err <= beta * prev + 1e-15, "{err} > β·{prev}");
        prev = err;
    })
    .unwrap();
}

#[test]
fn general_closed_form_matches_dense_inverse_oracle() {
    let mut r = rng(17);
    let g = connected_erdos_renyi(20, 0.2, &mut r);
    let view = g.normalize_random_walk();
    let u = Array1::from_shape_fn(20, |_| r.random_range(0.2..2.0));
    let ua = Array1::from_shape_fn(20, |_| r.random_range(0.0..2.0));
    let weights = RegularizerWeights::new(u.clone(), ua.clone()).unwrap();
    let f_init = random_stochastic(20, 3, 1.0, &mut r);
    let pred = random_stochastic(20, 3, 1.0, &mut r);

    let lap = Array2::eye(20) - dense_random_walk(&g);
    let system = lap + Array2::from_diag(&(&u + &ua));
    let rhs = Array2::from_diag(&u).dot(&f_init.view()) + Array2::from_diag(&ua).dot(&pred.view());
    let oracle = dense_inverse(&system).dot(&rhs);
    let got = general_closed_form(&view, &weights, &f_init, &pred).unwrap();
    assert!(max_abs(&got.view().to_owned(), &oracle) < 1e-10);
    assert!(simplex_error(&oracle) < 1e-9);
}

#[test]
fn full_variational_with_diagonal_weights_converges() {
    let mut r = rng(18);
    let g = connected_erdos_renyi(30, 0.15, &mut r);
    let view = g.normalize_random_walk();
    let u = Array1::from_shape_fn(30, |_| r.random_range(0.3..2.0));
    let ua = Array1::from_shape_fn(30, |_| r.random_range(0.0..2.0));
    let weights = RegularizerWeights::new(u, ua).unwrap();
    let f_init = random_stochastic(30, 3, 1.0, &mut r);
    let pred = random_stochastic(30, 3, 1.0, &mut r);
    let mut worst = 0.0f64;
    let iterated = full_variational_iterate_with(&view, &weights, &f_init, &pred, 1000, |_, f| {
        worst = worst.max(simplex_error(f));
    })
    .unwrap();
    let closed = general_closed_form(&view, &weights, &f_init, &pred).unwrap();
    assert!(iterated.max_abs_diff(&closed) < 1e-8);
    assert!(worst < 1e-9);
}

#[test]
fn full_variational_without_classifier_tracks_inner_iterate() {
    let mut r = rng(19);
    let g = connected_erdos_renyi(25, 0.2, &mut r);
    let view = g.normalize_random_walk();
    let beta = 0.7;
    let weights = RegularizerWeights::without_classifier(25, beta).unwrap();
    let f_init = random_stochastic(25, 3, 1.0, &mut r);
    let params = PropagationParams {
        beta,
        max_iter: 30,
        tol: 0.0,
        ..Default::default()
    };
    let mut a = Vec::new();
    let mut b = Vec::new();
    lerp_inner_iterate_with(&view, &f_init, &f_init, &params, None, |_, f| a.push(f.clone())).unwrap();
    full_variational_iterate_with(&view, &weights, &f_init, &LabelMatrix::uniform(25, 3), 30, |_, f| {
        b.push(f.clone())
    })
    .unwrap();
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert!(max_abs(x, y) < 1e-14);
    }
    let direct = full_variational_iterate(&view, &weights, &f_init, &LabelMatrix::uniform(25, 3), 30).unwrap();
    assert!(max_abs(&direct.into_inner(), b.last().unwrap()) == 0.0);
}

// --------------------------------------------------------------- solver

#[test]
fn curriculum_matches_all_pairs_filter() {
    let mut r = rng(20);
    for _ in 0..10 {
        let g = erdos_renyi(40, 0.06, &mut r);
        let all = floyd_warshall(&g);
        let labeled: Vec<usize> = (0..3).map(|_| r.random_range(0..40)).collect();
        for round in 1..=5 {
            let set = grow_curriculum(&g, &labeled, round).unwrap();
            let oracle: Vec<usize> = (0..40)
                .filter(|u| !labeled.contains(u))
                .filter(|&u| labeled.iter().filter_map(|&l| all[l][u]).min().is_some_and(|d| d <= round))
                .collect();
            assert_eq!(set.members, oracle);
        }
    }
}

fn dense_cost(
    a: &Array2<f64>,
    u: &Array1<f64>,
    ua: &Array1<f64>,
    f: &Array2<f64>,
    f_init: &Array2<f64>,
    pred: &Array2<f64>,
) -> f64 {
    let n = a.nrows();
    let lap = Array2::eye(n) - a;
    let tr = |m: Array2<f64>| m.diag().sum();
    let d1 = f - f_init;
    let d2 = f - pred;
    tr(f.t().dot(&lap).dot(f)) + tr(d1.t().dot(&Array2::from_diag(u)).dot(&d1)) + tr(d2.t().dot(&Array2::from_diag(ua)).dot(&d2))
}

#[test]
fn cost_matches_dense_trace_oracle() {
    let mut r = rng(21);
    for _ in 0..5 {
        let g = connected_erdos_renyi(10, 0.3, &mut r);
        let view = g.normalize_random_walk();
        let a = dense_random_walk(&g);
        let u = Array1::from_shape_fn(10, |_| r.random_range(0.1..2.0));
        let ua = Array1::from_shape_fn(10, |_| r.random_range(0.0..2.0));
        let weights = RegularizerWeights::new(u.clone(), ua.clone()).unwrap();
        let f = random_stochastic(10, 3, 1.0, &mut r);
        let f_init = random_stochastic(10, 3, 1.0, &mut r);

        let heads = vec![
            (vec![0, 1], Classifier::from_weights(gaussian(3, 7, &mut r))),
            (vec![0, 2], Classifier::from_weights(gaussian(3, 7, &mut r))),
        ];
        let ensemble = Ensemble::from_members(heads.clone(), Averaging::Probabilities).unwrap();

        // prediction from dense hop features
        let fv = f.view().to_owned();
        let hops = [fv.clone(), a.dot(&fv), a.dot(&a).dot(&fv)];
        let mut pred = Array2::<f64>::zeros((10, 3));
        for (blocks, cls) in &heads {
            let feats = concatenate![Axis(1), hops[blocks[0]], hops[blocks[1]]];
            let w = cls.weights();
            let z = feats.dot(&w.slice(ndarray::s![.., ..6]).t()) + &w.column(6);
            let p = z.mapv(f64::exp);
            let sums = p.sum_axis(Axis(1)).insert_axis(Axis(1));
            pred = pred + p / &sums;
        }
        pred /= 2.0;

        let oracle = dense_cost(&a, &u, &ua, &fv, &f_init.view().to_owned(), &pred);
        let got = cost_eval(&view, &weights, &f, &f_init, Some(&ensemble)).unwrap();
        assert_abs_diff_eq!(got, oracle, epsilon = 1e-10);
    }
}

#[test]
fn cost_special_cases() {
    let mut r = rng(22);
    let g = connected_erdos_renyi(12, 0.3, &mut r);
    let view = g.normalize_random_walk();
    let constant = LabelMatrix::try_new(Array2::from_shape_fn((12, 3), |(_, j)| [0.2, 0.5, 0.3][j])).unwrap();
    assert!(view.laplacian_quadratic(constant.view()).unwrap().abs() < 1e-15);

    let f = random_stochastic(12, 3, 1.0, &mut r);
    let weights = RegularizerWeights::without_classifier(12, 0.5).unwrap();
    let cost = cost_eval(&view, &weights, &f, &f, None).unwrap();
    assert_abs_diff_eq!(cost, view.laplacian_quadratic(f.view()).unwrap(), epsilon = 1e-15);

    let off = LabelMatrix::uniform(12, 3);
    let bad = lerp::embeddings::softmax_rows(gaussian(12, 3, &mut r).view()).into_inner() * 1.5;
    assert!(cost_eval(&view, &weights, &off, &off, None).is_ok());
    assert!(matches!(
        LabelMatrix::try_new(bad),
        Err(lerp::Error::SimplexViolation { .. })
    ));
}

#[test]
fn curriculum_from_distances_ignores_labeled_and_unreachable() {
    let d = vec![Some(0), Some(1), None, Some(3), Some(2)];
    assert_eq!(CurriculumSet::from_distances(&d, 2).members, vec![1, 4]);
    assert_eq!(CurriculumSet::from_distances(&d, 9).members, vec![1, 3, 4]);
}

#[test]
fn sharpen_direct_evaluation() {
    let s = sharpen(array![0.8, 0.2].view(), 0.5).unwrap();
    assert_abs_diff_eq!(s[0], 0.9411764705882353, epsilon = 1e-15);
}

//! Graph embedding checked against a dense generalized eigensolve written
//! here from scratch (cyclic Jacobi on the whitened pencil).

use nalgebra::DMatrix;
use pce_core::{embed, fit, lle_graph, DataMatrix, LleConfig, Ridge};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
}

/// Eigenvalues and eigenvectors (columns) of a symmetric matrix.
fn jacobi(a: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let mut a = a.clone();
    let mut v = DMatrix::identity(n, n);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[(p, q)].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * a[(p, q)]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| a[(i, i)]).collect(), v)
}

/// Descending eigenvalues of `l x = mu r x` for positive definite `r`.
fn pencil_values(l: &DMatrix<f64>, r: &DMatrix<f64>) -> Vec<f64> {
    let (rv, rq) = jacobi(r);
    let inv_sqrt =
        &rq * DMatrix::from_diagonal(&rv.iter().map(|x| 1.0 / x.sqrt()).collect::<Vec<_>>().into()) * rq.transpose();
    let white = &inv_sqrt * l * &inv_sqrt;
    let (mut values, _) = jacobi(&(&white + white.transpose()).scale(0.5));
    values.sort_by(|a, b| b.total_cmp(a));
    values
}

#[test]
fn lle_embedding_matches_dense_pencil() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for trial in 0..10 {
        let (m, n) = (4 + trial % 3, 14 + trial);
        let x = random_matrix(&mut rng, m, n);
        let d = DataMatrix::new(x.clone()).unwrap();
        let graph = lle_graph(
            &d,
            &LleConfig {
                neighbors: 4,
                reg: 1e-3,
            },
        )
        .unwrap();
        let w = graph.dense();
        let a = &w + w.transpose() - &w * w.transpose();
        let l = &x * a * x.transpose();
        let r = &x * x.transpose();
        let expected = pencil_values(&l, &r);

        let dim = 3;
        let e = embed(&d, &graph, dim, Ridge::Fixed(0.0)).unwrap();
        assert_eq!(e.values.len(), m);
        for (got, want) in e.values.iter().zip(&expected) {
            assert!(
                (got - want).abs() < 1e-9 * want.abs().max(1.0),
                "trial {trial}: {got} vs {want}"
            );
        }
        let theta = &e.theta;
        let constraint = theta.transpose() * &r * theta - DMatrix::identity(dim, dim);
        assert!(
            constraint.amax() < 1e-9,
            "trial {trial}: constraint {}",
            constraint.amax()
        );
        let residual = &l * theta - &r * theta * DMatrix::from_diagonal(&e.values[..dim].to_vec().into());
        assert!(residual.amax() < 1e-9, "trial {trial}: residual {}", residual.amax());
    }
}

#[test]
fn pce_projection_spans_leading_left_singular_vectors() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10 {
        let (m, n) = (rng.random_range(3..9), rng.random_range(10..20));
        let x = random_matrix(&mut rng, m, n);
        let r = &x * x.transpose();
        let (mut vals, vecs) = jacobi(&r);
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]));
        vals.sort_by(|a, b| b.total_cmp(a));
        // lambda halfway (geometrically) between the 2nd and 3rd squared singular values
        let lambda = 1.0 / (vals[1] * vals[2]).sqrt();
        let model = fit(&DataMatrix::new(x).unwrap(), lambda).unwrap();
        assert_eq!(model.k, 2);
        let top = DMatrix::from_fn(m, 2, |i, j| vecs[(i, order[j])]);
        let projected = &top * top.transpose() * &model.theta;
        assert!((projected - &model.theta).amax() < 1e-9);
        let gram = model.theta.transpose() * &r * &model.theta;
        assert!((gram - DMatrix::identity(2, 2)).amax() < 1e-9);
    }
}

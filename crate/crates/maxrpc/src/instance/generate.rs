//! Seeded instance generators: pure functions of their parameters.
//!
//! Counts follow the model B convention: exactly `round(p1 * n(n-1)/2)`
//! distinct constrained pairs, each with exactly `round(p2 * d^2)` distinct
//! forbidden tuples, rounding ties to even. The forced variant plants a
//! random solution and never forbids its tuples, making the instance
//! satisfiable by construction.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::instance::{ConstraintSpec, InstanceDoc};
use crate::network::Relation;

#[derive(Debug, Error)]
pub enum GenError {
    #[error("parameter {name} = {value} outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("n must be at least {0}")]
    TooFewVariables(usize),
}

#[derive(Debug, Clone, Copy)]
pub struct ModelBParams {
    pub n: usize,
    pub d: usize,
    /// Constraint density over the n(n-1)/2 pairs.
    pub p1: f64,
    /// Tightness: fraction of the d^2 tuples forbidden per constraint.
    pub p2: f64,
    pub seed: u64,
    /// Plant a random solution and forbid only tuples that miss it.
    pub forced: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct GeometricParams {
    pub n: usize,
    pub d: usize,
    /// Connect points of the unit square closer than this; values at or
    /// above the square's diameter produce the complete graph.
    pub dist: f64,
    pub p2: f64,
    pub seed: u64,
}

fn round_count(fraction: f64, total: usize) -> usize {
    (fraction * total as f64).round_ties_even() as usize
}

/// First `k` elements of a seeded shuffle of `0..m`, returned sorted.
fn sample_distinct(rng: &mut ChaCha8Rng, m: usize, k: usize) -> Vec<usize> {
    debug_assert!(k <= m);
    let mut pool: Vec<usize> = (0..m).collect();
    for i in 0..k {
        let j = i + rng.random_range(0..m - i);
        pool.swap(i, j);
    }
    let mut picked = pool[..k].to_vec();
    picked.sort_unstable();
    picked
}

fn pair_of_index(idx: usize, n: usize) -> (usize, usize) {
    // Index into the lexicographic list of pairs (i, j), i < j.
    let mut i = 0;
    let mut remaining = idx;
    loop {
        let row = n - 1 - i;
        if remaining < row {
            return (i, i + 1 + remaining);
        }
        remaining -= row;
        i += 1;
    }
}

fn forbidden_tuples(
    rng: &mut ChaCha8Rng,
    d: usize,
    count: usize,
    planted: Option<(i32, i32)>,
) -> Vec<(i32, i32)> {
    let square = d * d;
    let to_tuple = |idx: usize| ((idx / d) as i32, (idx % d) as i32);
    match planted {
        None => sample_distinct(rng, square, count)
            .into_iter()
            .map(to_tuple)
            .collect(),
        Some((a, b)) => {
            // Sample from the square minus the planted tuple, remapping
            // indices at or above it.
            let hole = a as usize * d + b as usize;
            sample_distinct(rng, square - 1, count)
                .into_iter()
                .map(|idx| to_tuple(if idx >= hole { idx + 1 } else { idx }))
                .collect()
        }
    }
}

pub fn gen_model_b(params: ModelBParams) -> Result<InstanceDoc, GenError> {
    let ModelBParams {
        n,
        d,
        p1,
        p2,
        seed,
        forced,
    } = params;
    if n < 2 {
        return Err(GenError::TooFewVariables(2));
    }
    if !(p1 > 0.0 && p1 <= 1.0) {
        return Err(GenError::OutOfRange {
            name: "p1",
            value: p1,
            range: "(0, 1]",
        });
    }
    if !(0.0..1.0).contains(&p2) {
        return Err(GenError::OutOfRange {
            name: "p2",
            value: p2,
            range: "[0, 1)",
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pair_count = round_count(p1, n * (n - 1) / 2);
    let tuple_count = round_count(p2, d * d);

    let solution: Option<Vec<i32>> = forced.then(|| {
        (0..n)
            .map(|_| rng.random_range(0..d as i32))
            .collect()
    });

    let pairs = sample_distinct(&mut rng, n * (n - 1) / 2, pair_count);
    let mut doc = InstanceDoc::new(format!(
        "modelB-n{n}-d{d}-p1_{p1}-p2_{p2}-s{seed}{}",
        if forced { "-forced" } else { "" }
    ));
    doc.domains = vec![(0..d as i32).collect(); n];
    for idx in pairs {
        let (x, y) = pair_of_index(idx, n);
        let planted = solution.as_ref().map(|s| (s[x], s[y]));
        let tuples = forbidden_tuples(&mut rng, d, tuple_count, planted);
        doc.constraints.push(ConstraintSpec {
            x,
            y,
            relation: Relation::Forbidden(tuples),
        });
    }
    doc.provenance = vec![
        ("format".into(), "generator".into()),
        ("generator".into(), "model_b".into()),
        ("n".into(), n.to_string()),
        ("d".into(), d.to_string()),
        ("p1".into(), p1.to_string()),
        ("p2".into(), p2.to_string()),
        ("seed".into(), seed.to_string()),
        ("forced".into(), forced.to_string()),
    ];
    Ok(doc)
}

pub fn gen_geometric(params: GeometricParams) -> Result<InstanceDoc, GenError> {
    let GeometricParams { n, d, dist, p2, seed } = params;
    if n < 2 {
        return Err(GenError::TooFewVariables(2));
    }
    if dist <= 0.0 {
        return Err(GenError::OutOfRange {
            name: "dist",
            value: dist,
            range: "(0, sqrt(2)]",
        });
    }
    if !(0.0..1.0).contains(&p2) {
        return Err(GenError::OutOfRange {
            name: "p2",
            value: p2,
            range: "[0, 1)",
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<(f64, f64)> = (0..n)
        .map(|_| (rng.random::<f64>(), rng.random::<f64>()))
        .collect();
    let complete = dist * dist >= 2.0;
    let tuple_count = round_count(p2, d * d);

    let mut doc = InstanceDoc::new(format!("geo-n{n}-d{d}-dist{dist}-p2_{p2}-s{seed}"));
    doc.domains = vec![(0..d as i32).collect(); n];
    for x in 0..n {
        for y in x + 1..n {
            let (dx, dy) = (points[x].0 - points[y].0, points[x].1 - points[y].1);
            if complete || dx * dx + dy * dy < dist * dist {
                let tuples = forbidden_tuples(&mut rng, d, tuple_count, None);
                doc.constraints.push(ConstraintSpec {
                    x,
                    y,
                    relation: Relation::Forbidden(tuples),
                });
            }
        }
    }
    doc.provenance = vec![
        ("format".into(), "generator".into()),
        ("generator".into(), "geometric".into()),
        ("n".into(), n.to_string()),
        ("d".into(), d.to_string()),
        ("dist".into(), dist.to_string()),
        ("p2".into(), p2.to_string()),
        ("seed".into(), seed.to_string()),
    ];
    Ok(doc)
}

/// The n-queens instance: one variable per row, values are columns, and each
/// row pair forbids shared columns and shared diagonals.
pub fn gen_queens(n: usize) -> InstanceDoc {
    assert!(n >= 1, "queens needs at least one row");
    let mut doc = InstanceDoc::new(format!("queens-{n}"));
    doc.domains = vec![(0..n as i32).collect(); n];
    for i in 0..n {
        for j in i + 1..n {
            doc.constraints.push(ConstraintSpec {
                x: i,
                y: j,
                relation: Relation::QueensSafe((j - i) as i32),
            });
        }
    }
    doc.provenance = vec![
        ("format".into(), "generator".into()),
        ("generator".into(), "queens".into()),
        ("n".into(), n.to_string()),
    ];
    doc
}

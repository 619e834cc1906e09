//! Nelder–Mead simplex search on the unit box.
//!
//! Every trial point is projected onto `[0, 1]^d` before evaluation, so the
//! caller only ever sees in-bounds candidates. Vertices are ordered by
//! `(value, coordinates)` lexicographically to make runs reproducible.

use std::cmp::Ordering;

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

#[derive(Debug, Clone)]
pub(crate) struct SimplexOutcome {
    pub best: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Best value after each iteration, starting with the initial simplex.
    pub trace: Vec<f64>,
}

#[derive(Debug, Clone)]
struct Vertex {
    x: Vec<f64>,
    f: f64,
}

fn order(a: &Vertex, b: &Vertex) -> Ordering {
    a.f.total_cmp(&b.f).then_with(|| {
        a.x.iter()
            .zip(&b.x)
            .map(|(p, q)| p.total_cmp(q))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    })
}

fn project(x: &mut [f64]) {
    for v in x {
        *v = v.clamp(0.0, 1.0);
    }
}

fn diameter(simplex: &[Vertex]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, a) in simplex.iter().enumerate() {
        for b in &simplex[i + 1..] {
            let dist = a.x.iter().zip(&b.x).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
            d = d.max(dist);
        }
    }
    d
}

/// Minimize `f` over the unit box from `start`.
///
/// `f` returns `Err` to abort the search; the error is passed through.
pub(crate) fn minimize<E>(
    mut f: impl FnMut(&[f64]) -> Result<f64, E>,
    start: &[f64],
    initial_step: f64,
    max_iters: usize,
    tol: f64,
) -> Result<SimplexOutcome, E> {
    let d = start.len();
    let mut x0 = start.to_vec();
    project(&mut x0);
    let mut simplex = Vec::with_capacity(d + 1);
    simplex.push(Vertex { f: f(&x0)?, x: x0.clone() });
    for i in 0..d {
        let mut x = x0.clone();
        x[i] += if x[i] + initial_step <= 1.0 { initial_step } else { -initial_step };
        project(&mut x);
        simplex.push(Vertex { f: f(&x)?, x });
    }
    simplex.sort_by(order);

    let mut trace = vec![simplex[0].f];
    let mut iterations = 0;
    let mut converged = diameter(&simplex) < tol;

    while !converged && iterations < max_iters {
        iterations += 1;
        let worst = simplex[d].clone();
        let centroid: Vec<f64> = (0..d)
            .map(|j| simplex[..d].iter().map(|v| v.x[j]).sum::<f64>() / d as f64)
            .collect();
        let along = |coef: f64| -> Vec<f64> {
            let mut x: Vec<f64> = centroid.iter().zip(&worst.x).map(|(c, w)| c + coef * (c - w)).collect();
            project(&mut x);
            x
        };

        let xr = along(REFLECT);
        let fr = f(&xr)?;
        let replacement = if fr < simplex[0].f {
            let xe = along(EXPAND);
            let fe = f(&xe)?;
            Some(if fe < fr { Vertex { x: xe, f: fe } } else { Vertex { x: xr, f: fr } })
        } else if fr < simplex[d - 1].f {
            Some(Vertex { x: xr, f: fr })
        } else {
            // Outside contraction when the reflection beats the worst vertex,
            // inside contraction otherwise.
            let (xc, bound) = if fr < worst.f { (along(CONTRACT * REFLECT), fr) } else { (along(-CONTRACT), worst.f) };
            let fc = f(&xc)?;
            if fc < bound {
                Some(Vertex { x: xc, f: fc })
            } else {
                None
            }
        };

        match replacement {
            Some(v) => simplex[d] = v,
            None => {
                let best = simplex[0].x.clone();
                for v in simplex.iter_mut().skip(1) {
                    let mut x: Vec<f64> = best.iter().zip(&v.x).map(|(b, p)| b + SHRINK * (p - b)).collect();
                    project(&mut x);
                    v.f = f(&x)?;
                    v.x = x;
                }
            }
        }
        simplex.sort_by(order);
        trace.push(simplex[0].f);
        converged = diameter(&simplex) < tol;
    }

    Ok(SimplexOutcome { best: simplex[0].x.clone(), value: simplex[0].f, iterations, converged, trace })
}

//! Vector norms of order 1, 2 and infinity, their duals, and the closed-form
//! maximum of a linear function over a norm ball.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NormOrder {
    #[serde(rename = "L1")]
    One,
    #[serde(rename = "L2")]
    Two,
    #[serde(rename = "Linf")]
    Infinity,
}

impl NormOrder {
    pub fn dual(self) -> NormOrder {
        dual_order(self)
    }

    pub fn parse(s: &str) -> Option<NormOrder> {
        match s.trim().to_ascii_lowercase().as_str() {
            "l1" | "1" | "one" => Some(NormOrder::One),
            "l2" | "2" | "two" => Some(NormOrder::Two),
            "linf" | "inf" | "infinity" => Some(NormOrder::Infinity),
            _ => None,
        }
    }
}

impl fmt::Display for NormOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NormOrder::One => "L1",
            NormOrder::Two => "L2",
            NormOrder::Infinity => "Linf",
        })
    }
}

pub fn norm(v: &[f64], order: NormOrder) -> f64 {
    match order {
        NormOrder::One => v.iter().map(|x| x.abs()).sum(),
        NormOrder::Two => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
        NormOrder::Infinity => v.iter().fold(0.0, |m, x| m.max(x.abs())),
    }
}

pub fn dual_order(order: NormOrder) -> NormOrder {
    match order {
        NormOrder::One => NormOrder::Infinity,
        NormOrder::Two => NormOrder::Two,
        NormOrder::Infinity => NormOrder::One,
    }
}

/// Maximizes `c·x` over `‖x‖_order ≤ radius`.
///
/// Returns the optimal value `radius·‖c‖_dual` and a maximizer. For the
/// L1 ball the mass goes on the lowest index attaining `max |c_j|`.
pub fn max_linear_over_ball(c: &[f64], order: NormOrder, radius: f64) -> (f64, Vec<f64>) {
    let mut x = vec![0.0; c.len()];
    let value = radius * norm(c, order.dual());
    if radius <= 0.0 || c.iter().all(|&v| v == 0.0) {
        return (value.max(0.0), x);
    }
    match order {
        NormOrder::One => {
            let mut best = 0;
            for (j, v) in c.iter().enumerate() {
                if v.abs() > c[best].abs() {
                    best = j;
                }
            }
            x[best] = radius * c[best].signum();
        }
        NormOrder::Two => {
            let n = norm(c, NormOrder::Two);
            for (xj, cj) in x.iter_mut().zip(c) {
                *xj = radius * cj / n;
            }
        }
        NormOrder::Infinity => {
            for (xj, cj) in x.iter_mut().zip(c) {
                *xj = if *cj > 0.0 {
                    radius
                } else if *cj < 0.0 {
                    -radius
                } else {
                    0.0
                };
            }
        }
    }
    (value, x)
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

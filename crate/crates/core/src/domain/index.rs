//! Float point-location over a domain, for checking long orbits.

use super::{Membership, RectUnion};

#[derive(Clone, Debug)]
struct SlabF {
    t_lo: f64,
    t_hi: f64,
    vs: Vec<(f64, f64)>,
}

/// Closed slabs of a domain in `f64`, searchable in `O(log n)`.
#[derive(Clone, Debug)]
pub struct RectIndex {
    slabs: Vec<SlabF>,
    tails: Vec<[f64; 4]>,
}

impl RectIndex {
    pub fn new(dom: &RectUnion) -> Self {
        let slabs = dom
            .region()
            .slabs
            .iter()
            .map(|s| SlabF {
                t_lo: s.t_lo.to_f64(),
                t_hi: s.t_hi.to_f64(),
                vs: s.vs.iter().map(|(a, b)| (a.to_f64(), b.to_f64())).collect(),
            })
            .collect();
        let tails = dom.tail_hulls.iter().map(|r| r.to_f64()).collect();
        RectIndex { slabs, tails }
    }

    /// Is `(t, v)` in the closed union?
    pub fn hit(&self, t: f64, v: f64) -> bool {
        let i = self.slabs.partition_point(|s| s.t_hi < t);
        self.slabs[i..].iter().take(2).any(|s| {
            if s.t_lo > t {
                return false;
            }
            let j = s.vs.partition_point(|sp| sp.1 < v);
            s.vs[j..].iter().take(2).any(|sp| sp.0 <= v && v <= sp.1)
        })
    }

    /// `Inside` when the whole `tol`-box around the point is covered,
    /// `Outside` when none of its nine probe points is (and no omitted family
    /// member is within `tol`), `Boundary` otherwise.
    pub fn classify(&self, t: f64, v: f64, tol: f64) -> Membership {
        let mut n = 0;
        for dt in [-tol, 0.0, tol] {
            for dv in [-tol, 0.0, tol] {
                n += self.hit(t + dt, v + dv) as usize;
            }
        }
        match n {
            9 => Membership::Inside,
            0 => {
                let near =
                    self.tails.iter().any(|b| b[0] - tol <= t && t <= b[1] + tol && b[2] - tol <= v && v <= b[3] + tol);
                if near {
                    Membership::Boundary
                } else {
                    Membership::Outside
                }
            }
            _ => Membership::Boundary,
        }
    }
}

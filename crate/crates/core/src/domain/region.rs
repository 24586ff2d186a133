//! Set algebra on finite unions of rectangles, up to boundaries.
//!
//! A region is stored as vertical slabs: sorted, disjoint `t`-ranges, each
//! with a sorted list of disjoint, non-touching `v`-intervals. Adjacent slabs
//! with equal `v`-lists are merged, so equal regions have equal slab lists.

use serde::{Deserialize, Serialize};

use super::measure::{rect_measure_raw, Enclosure};
use super::Rect;
use crate::error::Result;
use crate::exact::QuadSurd;

type Span = (QuadSurd, QuadSurd);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Slab {
    pub t_lo: QuadSurd,
    pub t_hi: QuadSurd,
    pub vs: Vec<Span>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Region {
    pub slabs: Vec<Slab>,
}

fn sorted_unique(mut xs: Vec<QuadSurd>) -> Vec<QuadSurd> {
    xs.sort();
    xs.dedup();
    xs
}

/// Union of possibly overlapping spans, as sorted disjoint spans.
fn merge_spans(mut spans: Vec<Span>) -> Vec<Span> {
    spans.retain(|s| s.0 < s.1);
    spans.sort_by(|a, b| a.0.cmp(&b.0));
    let mut out: Vec<Span> = Vec::new();
    for s in spans {
        match out.last_mut() {
            Some(last) if s.0 <= last.1 => {
                if s.1 > last.1 {
                    last.1 = s.1;
                }
            }
            _ => out.push(s),
        }
    }
    out
}

fn covers(spans: &[Span], lo: &QuadSurd, hi: &QuadSurd) -> bool {
    spans.iter().any(|s| &s.0 <= lo && hi <= &s.1)
}

/// Pointwise boolean combination of two span lists.
fn combine_spans(a: &[Span], b: &[Span], op: fn(bool, bool) -> bool) -> Vec<Span> {
    let cuts = sorted_unique(a.iter().chain(b).flat_map(|s| [s.0.clone(), s.1.clone()]).collect());
    let pieces = cuts
        .windows(2)
        .filter(|w| op(covers(a, &w[0], &w[1]), covers(b, &w[0], &w[1])))
        .map(|w| (w[0].clone(), w[1].clone()))
        .collect();
    merge_spans(pieces)
}

impl Region {
    pub fn empty() -> Self {
        Region::default()
    }

    pub fn from_rects(rects: &[Rect]) -> Self {
        let live: Vec<&Rect> = rects.iter().filter(|r| !r.is_degenerate()).collect();
        let cuts = sorted_unique(live.iter().flat_map(|r| [r.t_lo.clone(), r.t_hi.clone()]).collect());
        let slabs = cuts
            .windows(2)
            .map(|w| {
                let vs = live
                    .iter()
                    .filter(|r| r.t_lo <= w[0] && w[1] <= r.t_hi)
                    .map(|r| (r.v_lo.clone(), r.v_hi.clone()))
                    .collect();
                Slab { t_lo: w[0].clone(), t_hi: w[1].clone(), vs: merge_spans(vs) }
            })
            .collect();
        Region::normalized(slabs)
    }

    fn normalized(slabs: Vec<Slab>) -> Self {
        let mut out: Vec<Slab> = Vec::new();
        for s in slabs.into_iter().filter(|s| !s.vs.is_empty() && s.t_lo < s.t_hi) {
            match out.last_mut() {
                Some(last) if last.t_hi == s.t_lo && last.vs == s.vs => last.t_hi = s.t_hi,
                _ => out.push(s),
            }
        }
        Region { slabs: out }
    }

    fn spans_on(&self, lo: &QuadSurd, hi: &QuadSurd) -> &[Span] {
        self.slabs.iter().find(|s| &s.t_lo <= lo && hi <= &s.t_hi).map(|s| s.vs.as_slice()).unwrap_or(&[])
    }

    fn combine(&self, o: &Region, op: fn(bool, bool) -> bool) -> Region {
        let cuts =
            sorted_unique(self.slabs.iter().chain(&o.slabs).flat_map(|s| [s.t_lo.clone(), s.t_hi.clone()]).collect());
        let slabs = cuts
            .windows(2)
            .map(|w| Slab {
                t_lo: w[0].clone(),
                t_hi: w[1].clone(),
                vs: combine_spans(self.spans_on(&w[0], &w[1]), o.spans_on(&w[0], &w[1]), op),
            })
            .collect();
        Region::normalized(slabs)
    }

    pub fn union(&self, o: &Region) -> Region {
        self.combine(o, |a, b| a || b)
    }

    pub fn intersection(&self, o: &Region) -> Region {
        self.combine(o, |a, b| a && b)
    }

    pub fn difference(&self, o: &Region) -> Region {
        self.combine(o, |a, b| a && !b)
    }

    pub fn symmetric_difference(&self, o: &Region) -> Region {
        self.combine(o, |a, b| a != b)
    }

    pub fn is_empty(&self) -> bool {
        self.slabs.is_empty()
    }

    /// One half-open rectangle per slab and span.
    pub fn rects(&self) -> Vec<Rect> {
        self.slabs
            .iter()
            .flat_map(|s| {
                s.vs.iter()
                    .map(move |v| Rect::new(s.t_lo.clone(), s.t_hi.clone(), v.0.clone(), v.1.clone(), "[)[)", "slab"))
            })
            .collect()
    }

    /// Invariant measure (unnormalised) of the region.
    pub fn measure(&self) -> Result<Enclosure> {
        let mut acc = Enclosure::zero();
        for s in &self.slabs {
            for v in &s.vs {
                acc = acc.add(&rect_measure_raw(&s.t_lo, &s.t_hi, &v.0, &v.1)?);
            }
        }
        Ok(acc)
    }
}

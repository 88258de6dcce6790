//! Interchange, insert and reverse moves, the sequential variable
//! neighborhood descent, and the insertion-based iterative improvement.

use std::fmt;

use rand::{Rng, RngExt};

use crate::error::{Error, Result};
use crate::instance::{Instance, Time};
use crate::permutation::Permutation;
use crate::schedule::Evaluator;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MoveKind {
    /// Swap the jobs at positions `a` and `b`.
    Interchange,
    /// Remove the job at position `a` and reinsert it so it ends up at position `b`.
    Insert,
    /// Reverse the block between positions `a` and `b` inclusive.
    Reverse,
}

/// Neighborhood order used by the descent.
pub const NEIGHBORHOODS: [MoveKind; 3] = [MoveKind::Interchange, MoveKind::Insert, MoveKind::Reverse];

impl fmt::Display for MoveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MoveKind::Interchange => "interchange",
            MoveKind::Insert => "insert",
            MoveKind::Reverse => "reverse",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Move {
    pub kind: MoveKind,
    pub a: usize,
    pub b: usize,
}

impl Move {
    pub fn new(kind: MoveKind, a: usize, b: usize) -> Self {
        Move { kind, a, b }
    }

    /// Applies the move in place. Positions must be distinct and in range.
    #[inline]
    pub(crate) fn apply_slice(self, order: &mut [usize]) {
        let (a, b) = (self.a, self.b);
        match self.kind {
            MoveKind::Interchange => order.swap(a, b),
            MoveKind::Reverse => order[a.min(b)..=a.max(b)].reverse(),
            MoveKind::Insert if a < b => order[a..=b].rotate_left(1),
            MoveKind::Insert => order[b..=a].rotate_right(1),
        }
    }

    /// Move that restores the input when applied after this one.
    pub fn inverse(self) -> Move {
        match self.kind {
            MoveKind::Insert => Move::new(MoveKind::Insert, self.b, self.a),
            _ => self,
        }
    }
}

/// Applies a move to a copy of `perm`.
pub fn apply_move(perm: &Permutation, mv: Move) -> Result<Permutation> {
    let n = perm.len();
    if mv.a == mv.b || mv.a >= n || mv.b >= n {
        return Err(Error::invalid(format!(
            "{} move ({}, {}) is not valid for {n} positions",
            mv.kind, mv.a, mv.b
        )));
    }
    let mut out = perm.clone();
    mv.apply_slice(out.as_mut_slice());
    Ok(out)
}

/// Every move of a neighborhood in scan order: `(a, b)` lexicographic, with
/// `a < b` for interchange and reverse and all ordered pairs for insert.
pub fn moves(kind: MoveKind, n: usize) -> impl Iterator<Item = Move> {
    (0..n).flat_map(move |a| {
        let from = match kind {
            MoveKind::Insert => 0,
            _ => a + 1,
        };
        (from..n).filter(move |&b| b != a).map(move |b| Move::new(kind, a, b))
    })
}

/// First strictly improving move of one neighborhood, applied to `order`.
fn first_improvement(eval: &mut Evaluator<'_>, order: &mut [usize], current: Time, kind: MoveKind) -> Option<Time> {
    for mv in moves(kind, order.len()) {
        mv.apply_slice(order);
        if let Some(ms) = eval.makespan_capped(order, current - 1) {
            return Some(ms);
        }
        mv.inverse().apply_slice(order);
    }
    None
}

/// Sequential first-improvement descent over interchange, insert, reverse.
///
/// Any strict improvement is adopted immediately and the scan restarts from
/// the interchange neighborhood; the descent ends when all three
/// neighborhoods fail in a row. Returns the local optimum and its makespan.
pub fn vnd_with(eval: &mut Evaluator<'_>, perm: Permutation) -> (Permutation, Time) {
    let mut perm = perm;
    let mut current = eval.makespan(perm.as_slice());
    let mut level = 0;
    while level < NEIGHBORHOODS.len() {
        match first_improvement(eval, perm.as_mut_slice(), current, NEIGHBORHOODS[level]) {
            Some(ms) => {
                current = ms;
                level = 0;
            }
            None => level += 1,
        }
    }
    (perm, current)
}

/// Variable neighborhood descent. The descent is deterministic; `rng` is part
/// of the signature so every search component draws from a caller stream.
pub fn vnd<R: Rng + ?Sized>(instance: &Instance, perm: &Permutation, _rng: &mut R) -> Permutation {
    let mut eval = Evaluator::new(instance);
    vnd_with(&mut eval, perm.clone()).0
}

/// Insertion-based iterative improvement.
///
/// A pass removes `n` randomly chosen jobs one after another; each is tried at
/// every position and the best resulting order replaces the current one when
/// strictly better. Passes repeat until one finds no improvement.
pub fn iterative_improvement_with<R: Rng + ?Sized>(
    eval: &mut Evaluator<'_>,
    perm: Permutation,
    rng: &mut R,
) -> (Permutation, Time) {
    let n = perm.len();
    let mut order = perm.into_vec();
    let mut current = eval.makespan(&order);
    if n < 2 {
        return (Permutation::from_vec_unchecked(order), current);
    }
    let mut trial = Vec::with_capacity(n);
    loop {
        let mut improved = false;
        for _ in 0..n {
            let k = rng.random_range(0..n);
            let job = order[k];
            let mut rest = order.clone();
            rest.remove(k);
            let mut best: Option<(Time, usize)> = None;
            for pos in 0..n {
                trial.clear();
                trial.extend_from_slice(&rest[..pos]);
                trial.push(job);
                trial.extend_from_slice(&rest[pos..]);
                let cap = best.map_or(current - 1, |(ms, _)| ms - 1);
                if let Some(ms) = eval.makespan_capped(&trial, cap) {
                    best = Some((ms, pos));
                }
            }
            if let Some((ms, pos)) = best {
                rest.insert(pos, job);
                order = rest;
                current = ms;
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
    (Permutation::from_vec_unchecked(order), current)
}

pub fn iterative_improvement<R: Rng + ?Sized>(instance: &Instance, perm: &Permutation, rng: &mut R) -> Permutation {
    let mut eval = Evaluator::new(instance);
    iterative_improvement_with(&mut eval, perm.clone(), rng).0
}

//! Counting automata pushed through the level product structure.
//!
//! A word of `W_m` is `c_{m-1} ... c_0 x`, so the best count an automaton can
//! collect over `W_m` is a max-plus product of per-level matrices. Explicit
//! levels give exact matrices; a segment contributes its first element below
//! and its whole restricted product above.

use crate::error::{Error, Result};

use super::state::{CSet, ConstructionState};

/// Max-plus matrix; `-1` marks an impossible transition.
pub(crate) type Mat = Vec<Vec<i64>>;
/// What one word does to each state: next state and count collected.
pub(crate) type Func = Vec<(u16, u64)>;

/// Deterministic automaton whose transitions carry a count.
pub(crate) struct Dfa {
    delta: Vec<Vec<(u16, u64)>>,
    alphabet: u8,
}

/// KMP transition table of `g` on states `0..|g|`; entry `|g|` means a full match.
fn kmp_table(g: &[u8], alphabet: u8) -> Vec<Vec<usize>> {
    let n = g.len();
    let mut fail = vec![0usize; n + 1];
    for i in 1..n {
        let mut k = fail[i];
        while k > 0 && g[i] != g[k] {
            k = fail[k];
        }
        fail[i + 1] = if g[i] == g[k] { k + 1 } else { 0 };
    }
    (0..n)
        .map(|q| {
            (0..alphabet)
                .map(|x| {
                    let mut k = q;
                    loop {
                        if g[k] == x {
                            break k + 1;
                        }
                        if k == 0 {
                            break 0;
                        }
                        k = fail[k];
                    }
                })
                .collect()
        })
        .collect()
}

impl Dfa {
    /// Counts leftmost non-overlapping occurrences of `g`, which is the maximum.
    pub(crate) fn greedy(g: &[u8], alphabet: u8) -> Self {
        let n = g.len();
        let delta = kmp_table(g, alphabet)
            .into_iter()
            .map(|row| row.into_iter().map(|q| if q == n { (0, 1) } else { (q as u16, 0) }).collect())
            .collect();
        Dfa { delta, alphabet }
    }

    /// Reaches count 1 once `u` and then a disjoint `u2` have been read.
    pub(crate) fn chain(u: &[u8], u2: &[u8], alphabet: u8) -> Self {
        let (a, b) = (u.len(), u2.len());
        let accept = (a + b) as u16;
        let mut delta: Vec<Vec<(u16, u64)>> = kmp_table(u, alphabet)
            .into_iter()
            .map(|row| row.into_iter().map(|q| (q as u16, 0)).collect())
            .collect();
        delta.extend(kmp_table(u2, alphabet).into_iter().map(|row| {
            row.into_iter()
                .map(|q| if q == b { (accept, 1) } else { ((a + q) as u16, 0) })
                .collect()
        }));
        delta.push(vec![(accept, 0); alphabet as usize]);
        Dfa { delta, alphabet }
    }

    /// Reaches count 1 once `g` has been read.
    pub(crate) fn contains(g: &[u8], alphabet: u8) -> Self {
        let n = g.len() as u16;
        let mut delta: Vec<Vec<(u16, u64)>> = kmp_table(g, alphabet)
            .into_iter()
            .map(|row| row.into_iter().map(|q| if q as u16 == n { (n, 1) } else { (q as u16, 0) }).collect())
            .collect();
        delta.push(vec![(n, 0); alphabet as usize]);
        Dfa { delta, alphabet }
    }

    pub(crate) fn states(&self) -> usize {
        self.delta.len()
    }

    pub(crate) fn letter_fn(&self, x: u8) -> Func {
        self.delta.iter().map(|row| row[x as usize]).collect()
    }

    fn letters_matrix(&self, exclude: Option<u8>) -> Mat {
        let fs: Vec<_> = (0..self.alphabet)
            .filter(|&x| Some(x) != exclude)
            .map(|x| self.letter_fn(x))
            .collect();
        set_matrix(&fs, self.states())
    }
}

/// Per-level data of one automaton over one state, up to level `h`.
pub(crate) struct Transfer<'a> {
    st: &'a ConstructionState,
    dfa: Dfa,
    /// Element functions of explicit `C_t`; empty for segments.
    funcs: Vec<Vec<Func>>,
    /// Lower and upper matrices of `W_t` for `t = 0..=h`.
    w_lo: Vec<Mat>,
    w_hi: Vec<Mat>,
}

impl<'a> Transfer<'a> {
    pub(crate) fn new(st: &'a ConstructionState, dfa: Dfa, h: usize) -> Result<Self> {
        if h > st.depth() {
            return Err(Error::Invalid(format!("level {h} is not built")));
        }
        let s = dfa.states();
        let mut w_lo = vec![dfa.letters_matrix(None)];
        let mut w_hi = w_lo.clone();
        let mut funcs: Vec<Vec<Func>> = Vec::new();
        let mut elem0: Vec<Func> = Vec::new();
        let mut c_hi: Vec<Mat> = Vec::new();
        for t in 0..h {
            let (lo_c, hi_c) = match st.level(t).c.as_ref() {
                Some(CSet::Explicit(codes)) => {
                    let f: Vec<Func> = codes
                        .chunks_exact(t + 1)
                        .map(|code| {
                            let mut acc = identity(s);
                            for (pi, &d) in code[..t].iter().enumerate() {
                                acc = compose(&acc, &funcs[t - 1 - pi][d as usize]);
                            }
                            compose(&acc, &dfa.letter_fn(code[t] as u8))
                        })
                        .collect();
                    let mat = set_matrix(&f, s);
                    elem0.push(f.first().cloned().unwrap_or_else(|| identity(s)));
                    funcs.push(f);
                    (mat.clone(), mat)
                }
                Some(CSet::Segment { exclude, .. }) => {
                    let mut hi = dfa.letters_matrix(*exclude);
                    for m in &c_hi {
                        hi = mat_mul(m, &hi);
                    }
                    let first_letter = (0..st.alphabet).find(|&x| Some(x) != *exclude).unwrap();
                    let mut f0 = identity(s);
                    for tt in (0..t).rev() {
                        f0 = compose(&f0, &elem0[tt]);
                    }
                    f0 = compose(&f0, &dfa.letter_fn(first_letter));
                    elem0.push(f0.clone());
                    funcs.push(Vec::new());
                    (set_matrix(&[f0], s), hi)
                }
                None => return Err(Error::Invalid(format!("C at level {t} is not built"))),
            };
            w_lo.push(mat_mul(&lo_c, &w_lo[t]));
            w_hi.push(mat_mul(&hi_c, &w_hi[t]));
            c_hi.push(hi_c);
        }
        Ok(Transfer { st, dfa, funcs, w_lo, w_hi })
    }

    /// `(lo, hi)` best count from the start state over the top level.
    pub(crate) fn bounds(&self) -> (u64, u64) {
        let best = |m: &Mat| m[0].iter().copied().max().unwrap_or(-1).max(0) as u64;
        (best(self.w_lo.last().unwrap()), best(self.w_hi.last().unwrap()))
    }

    /// The least code of `W_m` whose word reaches a positive count. Needs every
    /// level below `m` explicit.
    pub(crate) fn lex_min_positive(&self, m: usize) -> Result<Option<Vec<u32>>> {
        if m >= self.w_lo.len() {
            return Err(Error::Invalid(format!("level {m} is beyond the transfer depth")));
        }
        if self.w_lo[m][0].iter().all(|&c| c <= 0) {
            return Ok(None);
        }
        let can_finish = |q: u16, got: u64, level: usize| {
            got > 0 || self.w_lo[level][q as usize].iter().any(|&c| c > 0)
        };
        let (mut q, mut got) = (0u16, 0u64);
        let mut code = Vec::with_capacity(m + 1);
        for level in (0..m).rev() {
            let f = &self.funcs[level];
            if f.is_empty() {
                return Err(Error::Invalid(format!("C at level {level} is symbolic")));
            }
            let pick = f
                .iter()
                .position(|e| {
                    let (q2, c) = e[q as usize];
                    can_finish(q2, got + c, level)
                })
                .expect("a completion exists");
            let (q2, c) = f[pick][q as usize];
            q = q2;
            got += c;
            code.push(pick as u32);
        }
        let x = (0..self.st.alphabet)
            .find(|&x| got + self.dfa.delta[q as usize][x as usize].1 > 0)
            .expect("a completion exists");
        code.push(x as u32);
        Ok(Some(code))
    }
}

fn identity(s: usize) -> Func {
    (0..s).map(|q| (q as u16, 0)).collect()
}

/// `a` then `b`.
fn compose(a: &[(u16, u64)], b: &[(u16, u64)]) -> Func {
    a.iter()
        .map(|&(q, c)| {
            let (q2, c2) = b[q as usize];
            (q2, c + c2)
        })
        .collect()
}

fn set_matrix(fs: &[Func], s: usize) -> Mat {
    let mut m = vec![vec![-1i64; s]; s];
    for f in fs {
        for (q, &(q2, c)) in f.iter().enumerate() {
            let cell = &mut m[q][q2 as usize];
            *cell = (*cell).max(c as i64);
        }
    }
    m
}

/// Max-plus product: first `a`, then `b`.
fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let s = a.len();
    let mut out = vec![vec![-1i64; s]; s];
    for i in 0..s {
        for k in 0..s {
            if a[i][k] < 0 {
                continue;
            }
            for j in 0..s {
                if b[k][j] >= 0 {
                    out[i][j] = out[i][j].max(a[i][k] + b[k][j]);
                }
            }
        }
    }
    out
}

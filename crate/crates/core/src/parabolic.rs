//! Solvers for the parabolic subgroups `P_i = ⟨S_i⟩`.
//!
//! A [`ParabolicSolver`] works on *local* letters: generator `j` of the
//! solver is the `j`-th letter of `S_i`. [`ParabolicOracle`] translates
//! between local letters and the global alphabet and rejects foreign
//! letters.

use std::collections::{HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::presentation::{ParabolicDescriptor, ParabolicKind};
use crate::words::{free_reduce, Letter, Word};

pub trait ParabolicSolver: Send + Sync {
    fn generator_count(&self) -> usize;

    /// Shortest word equal to `w`, ties broken shortlex. Must be a function
    /// of the element alone, so it doubles as a canonical key.
    fn geodesic(&self, w: &[Letter]) -> Vec<Letter>;

    fn is_trivial(&self, w: &[Letter]) -> bool {
        self.geodesic(w).is_empty()
    }

    fn is_abelian(&self) -> bool;

    fn supports_conjugacy(&self) -> bool {
        true
    }

    /// Some `t` with `t·p·t⁻¹ = q`, or `None` when `p` and `q` are not
    /// conjugate in the subgroup.
    fn conjugate(&self, p: &[Letter], q: &[Letter]) -> Option<Vec<Letter>>;

    /// Geodesic forms of all elements of length at most `r`, in shortlex
    /// order. Stops with `None` once more than `limit` elements are found.
    fn ball(&self, r: usize, limit: usize) -> Option<Vec<Vec<Letter>>> {
        let mut seen: HashSet<Vec<Letter>> = HashSet::new();
        let mut layer = vec![Vec::new()];
        seen.insert(Vec::new());
        let mut out = vec![Vec::new()];
        for d in 0..r {
            let mut next = Vec::new();
            for w in &layer {
                for code in 0..2 * self.generator_count() as u16 {
                    let mut ext = w.clone();
                    ext.push(Letter::from_code(code));
                    let g = self.geodesic(&ext);
                    if g.len() == d + 1 && seen.insert(g.clone()) {
                        next.push(g);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            out.extend(next.iter().cloned());
            if out.len() > limit {
                return None;
            }
            layer = next;
        }
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        Some(out)
    }
}

/// `Z^rank`, normal form by exponent vector.
pub struct FreeAbelian {
    rank: usize,
}

impl FreeAbelian {
    pub fn new(rank: usize) -> Self {
        FreeAbelian { rank }
    }

    fn exponents(&self, w: &[Letter]) -> Vec<i64> {
        let mut e = vec![0i64; self.rank];
        for l in w {
            e[l.generator()] += if l.is_inverse() { -1 } else { 1 };
        }
        e
    }
}

impl ParabolicSolver for FreeAbelian {
    fn generator_count(&self) -> usize {
        self.rank
    }

    fn geodesic(&self, w: &[Letter]) -> Vec<Letter> {
        let mut out = Vec::new();
        for (g, e) in self.exponents(w).into_iter().enumerate() {
            let l = Letter::new(g, e < 0);
            out.extend(std::iter::repeat_n(l, e.unsigned_abs() as usize));
        }
        out
    }

    fn is_abelian(&self) -> bool {
        true
    }

    fn conjugate(&self, p: &[Letter], q: &[Letter]) -> Option<Vec<Letter>> {
        (self.exponents(p) == self.exponents(q)).then(Vec::new)
    }
}

/// Free group of the given rank; conjugacy through cyclic words.
pub struct FreeParabolic {
    rank: usize,
}

impl FreeParabolic {
    pub fn new(rank: usize) -> Self {
        FreeParabolic { rank }
    }
}

impl ParabolicSolver for FreeParabolic {
    fn generator_count(&self) -> usize {
        self.rank
    }

    fn geodesic(&self, w: &[Letter]) -> Vec<Letter> {
        free_reduce(w).into_letters()
    }

    fn is_abelian(&self) -> bool {
        self.rank <= 1
    }

    fn conjugate(&self, p: &[Letter], q: &[Letter]) -> Option<Vec<Letter>> {
        let (pc, a) = crate::words::cyclic_reduce(&free_reduce(p));
        let (qc, b) = crate::words::cyclic_reduce(&free_reduce(q));
        if pc.len() != qc.len() {
            return None;
        }
        // qc = s⁻¹·pc·s for s a prefix of pc, so t = b·s⁻¹·a⁻¹.
        let n = pc.len().max(1);
        (0..n).find(|&k| pc.rotate(k) == qc).map(|k| {
            let s = pc.prefix(k);
            Word::product(&[&b, &s.inverse(), &a.inverse()]).into_letters()
        })
    }
}

/// A finite group given by its Cayley table. Local generator `j` is element
/// `j + 1`; element 0 is the identity.
pub struct FiniteParabolic {
    table: Vec<Vec<usize>>,
    inverse: Vec<usize>,
    /// Shortlex geodesic for every element.
    forms: Vec<Vec<Letter>>,
}

impl FiniteParabolic {
    pub fn new(table: Vec<Vec<usize>>) -> Self {
        let n = table.len();
        let inverse: Vec<usize> = (0..n)
            .map(|a| (0..n).find(|&b| table[a][b] == 0).expect("Latin square"))
            .collect();
        let mut forms: Vec<Option<Vec<Letter>>> = vec![None; n];
        forms[0] = Some(Vec::new());
        let mut queue = VecDeque::from([0usize]);
        while let Some(e) = queue.pop_front() {
            let base = forms[e].clone().unwrap();
            for code in 0..2 * (n as u16 - 1) {
                let l = Letter::from_code(code);
                let next = table[e][Self::letter_element_of(&inverse, l)];
                if forms[next].is_none() {
                    let mut w = base.clone();
                    w.push(l);
                    forms[next] = Some(w);
                    queue.push_back(next);
                }
            }
        }
        let forms = forms.into_iter().map(|f| f.expect("letters generate")).collect();
        FiniteParabolic { table, inverse, forms }
    }

    fn letter_element_of(inverse: &[usize], l: Letter) -> usize {
        let e = l.generator() + 1;
        if l.is_inverse() {
            inverse[e]
        } else {
            e
        }
    }

    pub fn evaluate(&self, w: &[Letter]) -> usize {
        w.iter()
            .fold(0, |acc, &l| self.table[acc][Self::letter_element_of(&self.inverse, l)])
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }
}

impl ParabolicSolver for FiniteParabolic {
    fn generator_count(&self) -> usize {
        self.table.len() - 1
    }

    fn geodesic(&self, w: &[Letter]) -> Vec<Letter> {
        self.forms[self.evaluate(w)].clone()
    }

    fn is_abelian(&self) -> bool {
        let n = self.table.len();
        (0..n).all(|i| (0..n).all(|j| self.table[i][j] == self.table[j][i]))
    }

    fn conjugate(&self, p: &[Letter], q: &[Letter]) -> Option<Vec<Letter>> {
        let (p, q) = (self.evaluate(p), self.evaluate(q));
        let mut order: Vec<usize> = (0..self.order()).collect();
        order.sort_by(|&a, &b| {
            let (fa, fb) = (&self.forms[a], &self.forms[b]);
            fa.len().cmp(&fb.len()).then_with(|| fa.cmp(fb))
        });
        order
            .into_iter()
            .find(|&t| self.table[self.table[t][p]][self.inverse[t]] == q)
            .map(|t| self.forms[t].clone())
    }
}

/// A solver bound to its descriptor and to the global alphabet.
pub struct ParabolicOracle {
    descriptor: ParabolicDescriptor,
    /// Global generator index of the first letter of `S_i`.
    offset: usize,
    /// Names of the global generators, for error messages.
    alphabet: Vec<char>,
    solver: Box<dyn ParabolicSolver>,
}

impl std::fmt::Debug for ParabolicOracle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ParabolicOracle")
            .field("index", &self.descriptor.index)
            .field("kind", &self.descriptor.kind.name())
            .field("offset", &self.offset)
            .finish()
    }
}

impl ParabolicOracle {
    pub fn new(descriptor: ParabolicDescriptor, offset: usize, alphabet: Vec<char>) -> Self {
        let solver: Box<dyn ParabolicSolver> = match &descriptor.kind {
            ParabolicKind::FreeAbelian { rank } => Box::new(FreeAbelian::new(*rank)),
            ParabolicKind::Free { rank } => Box::new(FreeParabolic::new(*rank)),
            ParabolicKind::Finite { table } => Box::new(FiniteParabolic::new(table.clone())),
        };
        ParabolicOracle { descriptor, offset, alphabet, solver }
    }

    /// Wraps a user-supplied solver. Its generator count must match the descriptor.
    pub fn with_solver(
        descriptor: ParabolicDescriptor,
        offset: usize,
        alphabet: Vec<char>,
        solver: Box<dyn ParabolicSolver>,
    ) -> Self {
        assert_eq!(solver.generator_count(), descriptor.generators.len());
        ParabolicOracle { descriptor, offset, alphabet, solver }
    }

    pub fn index(&self) -> usize {
        self.descriptor.index
    }

    pub fn descriptor(&self) -> &ParabolicDescriptor {
        &self.descriptor
    }

    pub fn generator_count(&self) -> usize {
        self.descriptor.generators.len()
    }

    pub fn is_abelian(&self) -> bool {
        self.solver.is_abelian()
    }

    pub fn contains(&self, l: Letter) -> bool {
        (self.offset..self.offset + self.generator_count()).contains(&l.generator())
    }

    fn to_local(&self, w: &[Letter]) -> Result<Vec<Letter>> {
        w.iter()
            .map(|&l| {
                if self.contains(l) {
                    Ok(Letter::new(l.generator() - self.offset, l.is_inverse()))
                } else {
                    Err(self.foreign(l))
                }
            })
            .collect()
    }

    fn foreign(&self, l: Letter) -> Error {
        let letter = self.alphabet.get(l.generator()).copied().unwrap_or('?');
        let letter = if l.is_inverse() { letter.to_ascii_uppercase() } else { letter };
        Error::ForeignLetter { letter, index: self.index() }
    }

    fn to_global(&self, w: Vec<Letter>) -> Vec<Letter> {
        w.into_iter()
            .map(|l| Letter::new(l.generator() + self.offset, l.is_inverse()))
            .collect()
    }

    pub fn trivial(&self, w: &[Letter]) -> Result<bool> {
        Ok(self.solver.is_trivial(&self.to_local(w)?))
    }

    pub fn geodesic_form(&self, w: &[Letter]) -> Result<Word> {
        Ok(Word::from_reduced(self.to_global(self.solver.geodesic(&self.to_local(w)?))))
    }

    /// [`Self::geodesic_form`] for letters already known to lie in `S_i`.
    pub(crate) fn geodesic_letters(&self, w: &[Letter]) -> Vec<Letter> {
        let local = self.to_local(w).expect("letters of the parabolic alphabet");
        self.to_global(self.solver.geodesic(&local))
    }

    /// Γ_i-length of the element represented by `w`.
    pub fn element_length(&self, w: &[Letter]) -> Result<usize> {
        Ok(self.solver.geodesic(&self.to_local(w)?).len())
    }

    pub fn conjugate(&self, p: &[Letter], q: &[Letter]) -> Result<Option<Word>> {
        if !self.solver.supports_conjugacy() {
            return Err(Error::NoConjugacySolver(self.index()));
        }
        let (p, q) = (self.to_local(p)?, self.to_local(q)?);
        Ok(self
            .solver
            .conjugate(&p, &q)
            .map(|t| Word::from_letters(self.to_global(t))))
    }

    /// Every element of Γ_i-length at most `r`, as shortlex geodesics.
    pub fn ball(&self, r: usize) -> Vec<Word> {
        self.ball_within(r, usize::MAX).expect("unbounded")
    }

    pub fn ball_within(&self, r: usize, limit: usize) -> Result<Vec<Word>> {
        let ball = self.solver.ball(r, limit).ok_or_else(|| Error::Budget {
            what: format!("ball of radius {r} in P_{}", self.index()),
            limit,
        })?;
        Ok(ball
            .into_iter()
            .map(|w| Word::from_reduced(self.to_global(w)))
            .collect())
    }
}

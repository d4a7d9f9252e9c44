//! Finitely presented groups, Fox calculus and twisted Alexander polynomials.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::algebra::{cokernel, minors_gcd, Cokernel, Exponent, IntMatrix, LaurentPoly, PolyMatrix};
use crate::branched_surface::Spine;
use crate::error::{Error, Result};
use crate::triangulation::SpanningTree;

/// A freely reduced word; letters are `(generator, ±1)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FreeWord(Vec<(usize, i32)>);

impl FreeWord {
    pub fn identity() -> FreeWord {
        FreeWord(Vec::new())
    }

    pub fn generator(g: usize) -> FreeWord {
        FreeWord(vec![(g, 1)])
    }

    pub fn new(letters: impl IntoIterator<Item = (usize, i32)>) -> FreeWord {
        let mut w = FreeWord::identity();
        for l in letters {
            w.push(l);
        }
        w
    }

    fn push(&mut self, (g, e): (usize, i32)) {
        assert!(e == 1 || e == -1, "letters have exponent ±1");
        if let Some(&(h, f)) = self.0.last() {
            if h == g && f == -e {
                self.0.pop();
                return;
            }
        }
        self.0.push((g, e));
    }

    pub fn letters(&self) -> &[(usize, i32)] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> FreeWord {
        FreeWord(self.0.iter().rev().map(|&(g, e)| (g, -e)).collect())
    }

    pub fn mul(&self, other: &FreeWord) -> FreeWord {
        let mut w = self.clone();
        for &l in &other.0 {
            w.push(l);
        }
        w
    }

    pub fn pow(&self, n: i64) -> FreeWord {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut w = FreeWord::identity();
        for _ in 0..n.unsigned_abs() {
            w = w.mul(&base);
        }
        w
    }

    /// Strips cancelling letters from the two ends (conjugation).
    pub fn cyclically_reduced(&self) -> FreeWord {
        let w = &self.0;
        let (mut lo, mut hi) = (0, w.len());
        while hi - lo >= 2 && w[lo].0 == w[hi - 1].0 && w[lo].1 == -w[hi - 1].1 {
            lo += 1;
            hi -= 1;
        }
        FreeWord(w[lo..hi].to_vec())
    }

    pub fn rotated(&self, k: usize) -> FreeWord {
        let n = self.0.len();
        if n == 0 {
            return self.clone();
        }
        let mut v = self.0[k % n..].to_vec();
        v.extend_from_slice(&self.0[..k % n]);
        FreeWord(v)
    }

    /// Equal as relators: same up to cyclic rotation and inversion.
    pub fn same_relator(&self, other: &FreeWord) -> bool {
        let a = self.cyclically_reduced();
        let b = other.cyclically_reduced();
        if a.len() != b.len() {
            return false;
        }
        let bi = b.inverse();
        (0..a.len().max(1)).any(|k| a.rotated(k) == b || a.rotated(k) == bi)
    }

    pub fn exponent_sum(&self, g: usize) -> i64 {
        self.0.iter().filter(|l| l.0 == g).map(|l| l.1 as i64).sum()
    }

    pub fn occurrences(&self, g: usize) -> usize {
        self.0.iter().filter(|l| l.0 == g).count()
    }

    /// Replaces every generator `g` by `images[g]`.
    pub fn substitute(&self, images: &[FreeWord]) -> FreeWord {
        let mut w = FreeWord::identity();
        for &(g, e) in &self.0 {
            let img = if e > 0 { images[g].clone() } else { images[g].inverse() };
            w = w.mul(&img);
        }
        w
    }

    pub fn to_text(&self, names: &[String]) -> String {
        self.0
            .iter()
            .map(|&(g, e)| if e > 0 { names[g].clone() } else { invert_case(&names[g]) })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

fn invert_case(name: &str) -> String {
    let mut c = name.chars();
    match c.next() {
        Some(f) => f.to_ascii_uppercase().to_string() + c.as_str(),
        None => String::new(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub generators: Vec<String>,
    pub relators: Vec<FreeWord>,
}

impl Presentation {
    pub fn new(generators: Vec<String>, relators: Vec<FreeWord>) -> Result<Presentation> {
        let m = generators.len();
        if relators.iter().any(|r| r.0.iter().any(|&(g, _)| g >= m)) {
            return Err(Error::IndexMismatch("relator uses an unlisted generator".into()));
        }
        Ok(Presentation { generators, relators })
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g == name)
    }

    /// Parses a word of whitespace separated generator names; an upper-case first letter
    /// means the inverse. `1` stands for the empty word.
    pub fn parse_word(&self, text: &str) -> Result<FreeWord> {
        let mut letters = Vec::new();
        for tok in text.split_whitespace() {
            if tok == "1" {
                continue;
            }
            let first = tok.chars().next().unwrap();
            let (name, e) = if first.is_ascii_uppercase() {
                (first.to_ascii_lowercase().to_string() + &tok[first.len_utf8()..], -1)
            } else {
                (tok.to_string(), 1)
            };
            let g = self
                .generator_index(&name)
                .ok_or_else(|| Error::Parse(format!("unknown generator '{tok}'")))?;
            letters.push((g, e));
        }
        Ok(FreeWord::new(letters))
    }

    /// Text format: a `gens: a,b,c` line, then one `rel: a B a b` line per relator.
    /// Blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Presentation> {
        let mut pres: Option<Presentation> = None;
        for raw in text.lines() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (key, rest) = line
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("expected 'gens:' or 'rel:', got '{line}'")))?;
            match (key.trim(), pres.as_mut()) {
                ("gens", None) => {
                    let gens: Vec<String> =
                        rest.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
                    for g in &gens {
                        if !g.chars().next().is_some_and(|c| c.is_ascii_lowercase()) {
                            return Err(Error::Parse(format!("generator '{g}' must start with a lower-case letter")));
                        }
                    }
                    pres = Some(Presentation { generators: gens, relators: Vec::new() });
                }
                ("gens", Some(_)) => return Err(Error::Parse("repeated 'gens:' line".into())),
                ("rel", Some(p)) => {
                    let w = p.parse_word(rest)?;
                    p.relators.push(w);
                }
                ("rel", None) => return Err(Error::Parse("'rel:' before 'gens:'".into())),
                (k, _) => return Err(Error::Parse(format!("unknown key '{k}'"))),
            }
        }
        pres.ok_or_else(|| Error::Parse("missing 'gens:' line".into()))
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("gens: {}\n", self.generators.join(","));
        for r in &self.relators {
            s.push_str(&format!("rel: {}\n", r.to_text(&self.generators)));
        }
        s
    }

    pub fn total_length(&self) -> usize {
        self.relators.iter().map(|r| r.len()).sum()
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Integer combination of free group elements.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GroupRingElement {
    terms: BTreeMap<FreeWord, BigInt>,
}

impl GroupRingElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn word(w: FreeWord) -> Self {
        Self::term(w, 1)
    }

    pub fn term(w: FreeWord, c: impl Into<BigInt>) -> Self {
        let mut out = Self::zero();
        out.add_term(w, c.into());
        out
    }

    pub fn add_term(&mut self, w: FreeWord, c: BigInt) {
        let e = self.terms.entry(w.clone()).or_insert_with(BigInt::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&w);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&FreeWord, &BigInt)> {
        self.terms.iter()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                out.add_term(u.mul(v), a * b);
            }
        }
        out
    }

    pub fn neg(&self) -> Self {
        GroupRingElement { terms: self.terms.iter().map(|(w, c)| (w.clone(), -c)).collect() }
    }

    /// The terms as `(word, ±1)` pairs, repeated by multiplicity.
    pub fn signed_terms(&self) -> Vec<(FreeWord, i32)> {
        let mut out = Vec::new();
        for (w, c) in &self.terms {
            let s = if *c > BigInt::zero() { 1 } else { -1 };
            let n: usize = num_traits::ToPrimitive::to_usize(&(c * s)).expect("small multiplicity");
            out.extend(std::iter::repeat((w.clone(), s)).take(n));
        }
        out
    }
}

/// `∂w/∂x_g`, from `∂(uv) = ∂u + u ∂v` and `∂(x⁻¹)/∂x = −x⁻¹`.
pub fn fox_derivative(word: &FreeWord, g: usize) -> GroupRingElement {
    let mut out = GroupRingElement::zero();
    let mut prefix = FreeWord::identity();
    for &(h, e) in &word.0 {
        if h == g {
            if e > 0 {
                out.add_term(prefix.clone(), BigInt::one());
            } else {
                out.add_term(prefix.mul(&FreeWord(vec![(h, e)])), -BigInt::one());
            }
        }
        prefix = prefix.mul(&FreeWord(vec![(h, e)]));
    }
    out
}

pub fn jacobian(pres: &Presentation) -> Vec<Vec<GroupRingElement>> {
    pres.relators
        .iter()
        .map(|r| (0..pres.generators.len()).map(|g| fox_derivative(r, g)).collect())
        .collect()
}

/// The tensor character `γ ↦ ω(γ) π(γ)` on generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Character {
    pub omega: Vec<i32>,
    pub pi: Vec<Exponent>,
    pub nvars: usize,
}

impl Character {
    pub fn omega_of(&self, w: &FreeWord) -> i32 {
        w.0.iter().map(|&(g, _)| self.omega[g]).product()
    }

    pub fn pi_of(&self, w: &FreeWord) -> Exponent {
        let mut out = vec![0; self.nvars];
        for &(g, e) in &w.0 {
            for (o, x) in out.iter_mut().zip(&self.pi[g]) {
                *o += e as i64 * x;
            }
        }
        out
    }

    /// Both characters must kill every relator.
    pub fn check(&self, pres: &Presentation) -> Result<()> {
        if self.omega.len() != pres.generators.len() || self.pi.len() != pres.generators.len() {
            return Err(Error::IndexMismatch("character and presentation disagree on generators".into()));
        }
        for (i, r) in pres.relators.iter().enumerate() {
            if self.omega_of(r) != 1 {
                return Err(Error::InternalInconsistency(format!("ω does not kill relator {i}")));
            }
            if self.pi_of(r).iter().any(|&x| x != 0) {
                return Err(Error::InternalInconsistency(format!("π does not kill relator {i}")));
            }
        }
        Ok(())
    }

    /// The character on a presentation whose generators are a subset (by name) of `from`'s.
    pub fn restrict(&self, from: &Presentation, to: &Presentation) -> Result<Character> {
        let idx = to
            .generators
            .iter()
            .map(|g| from.generator_index(g).ok_or_else(|| Error::IndexMismatch(format!("unknown generator {g}"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Character {
            omega: idx.iter().map(|&i| self.omega[i]).collect(),
            pi: idx.iter().map(|&i| self.pi[i].clone()).collect(),
            nvars: self.nvars,
        })
    }
}

pub fn project(elem: &GroupRingElement, ch: &Character) -> LaurentPoly {
    let mut out = LaurentPoly::zero(ch.nvars);
    for (w, c) in elem.terms() {
        let c = c * BigInt::from(ch.omega_of(w));
        out = &out + &LaurentPoly::monomial(ch.nvars, ch.pi_of(w), c);
    }
    out
}

pub fn projected_jacobian(pres: &Presentation, ch: &Character) -> PolyMatrix {
    let rows = jacobian(pres)
        .iter()
        .map(|row| row.iter().map(|e| project(e, ch)).collect())
        .collect();
    if pres.relators.is_empty() {
        return PolyMatrix::zeros(0, pres.generators.len(), ch.nvars);
    }
    PolyMatrix::from_rows(rows, ch.nvars).expect("rectangular")
}

/// gcd of the `(m-1)`-minors of the projected Jacobian, `m` the number of generators.
/// With a single generator the only such minor is empty, and the result is 1.
pub fn twisted_alexander(pres: &Presentation, ch: &Character) -> LaurentPoly {
    let m = pres.generators.len();
    if m == 0 {
        return LaurentPoly::one(ch.nvars);
    }
    minors_gcd(&projected_jacobian(pres, ch), m - 1)
}

/// Exponent-sum matrix, generators by relators.
pub fn relation_matrix(pres: &Presentation) -> IntMatrix {
    let rows: Vec<Vec<i64>> = (0..pres.generators.len())
        .map(|g| pres.relators.iter().map(|r| r.exponent_sum(g)).collect())
        .collect();
    if rows.is_empty() {
        return IntMatrix::zeros(0, pres.relators.len());
    }
    if pres.relators.is_empty() {
        return IntMatrix::zeros(pres.generators.len(), 0);
    }
    IntMatrix::from_rows(&rows)
}

/// `H_1` of the group; `projection` sends each generator to the torsion-free quotient.
pub fn abelianization(pres: &Presentation) -> Cokernel {
    cokernel(&relation_matrix(pres))
}

/// Invariant factors with one 0 per free summand, e.g. `[16, 0]` for `Z/16 + Z`.
pub fn invariant_factors(c: &Cokernel) -> Vec<BigInt> {
    let mut v = c.torsion.clone();
    v.extend(std::iter::repeat(BigInt::zero()).take(c.rank));
    v
}

/// Exponent sums of a word, one per generator.
pub fn exponent_vector(pres: &Presentation, w: &FreeWord) -> Vec<i64> {
    (0..pres.generators.len()).map(|g| w.exponent_sum(g)).collect()
}

/// Character with `ω` given on generators and `π` read off the abelianization.
pub fn character_with_omega(pres: &Presentation, omega: Vec<i32>) -> Result<Character> {
    let ab = abelianization(pres);
    let ch = Character { omega, pi: ab.projection, nvars: ab.rank };
    ch.check(pres)?;
    Ok(ch)
}

/// Sector boundary word starting at the top vertex: the corner between the two
/// one-sheeted sides.
fn relator_start(spine: &Spine, s: usize) -> usize {
    let word = &spine.sectors[s];
    let n = word.len();
    let upper = |p: usize| spine.one_sheeted[word[p].0] == (s, p);
    (0..n).find(|&p| upper((p + n - 1) % n) && upper(p)).unwrap_or(0)
}

/// Generators are the non-tree dual edges, named `z<edge>`; one relator per sector.
pub fn presentation_from_spine(spine: &Spine, tree: &SpanningTree) -> Result<(Presentation, Character)> {
    let weights = spine.edge_weights()?;
    let graph = spine.dual_graph();
    let free: Vec<usize> = (0..spine.edges.len()).filter(|&e| !tree.contains(e)).collect();
    let mut gen_of = vec![usize::MAX; spine.edges.len()];
    for (i, &e) in free.iter().enumerate() {
        gen_of[e] = i;
    }
    let generators = free.iter().map(|e| format!("z{e}")).collect();
    let relators = (0..spine.sectors.len())
        .map(|s| {
            let w = &spine.sectors[s];
            let start = relator_start(spine, s);
            FreeWord::new(
                (0..w.len())
                    .map(|k| w[(start + k) % w.len()])
                    .filter(|&(e, _)| gen_of[e] != usize::MAX)
                    .map(|(e, d)| (gen_of[e], d)),
            )
        })
        .collect();
    let pres = Presentation { generators, relators };
    let omega = free
        .iter()
        .map(|&e| spine.omega(&weights, &tree.fundamental_cycle(&graph, e)))
        .collect::<Result<Vec<_>>>()?;
    let ch = character_with_omega(&pres, omega)?;
    Ok((pres, ch))
}

/// Rewrites a closed dual-edge path as a word in the spine presentation's generators.
pub fn word_of_cycle(pres: &Presentation, tree: &SpanningTree, cycle: &[(usize, i32)]) -> Result<FreeWord> {
    let mut letters = Vec::new();
    for &(e, d) in cycle {
        if tree.contains(e) {
            continue;
        }
        let g = pres
            .generator_index(&format!("z{e}"))
            .ok_or_else(|| Error::IndexMismatch(format!("edge {e} is not a generator")))?;
        letters.push((g, d));
    }
    Ok(FreeWord::new(letters))
}

/// Greedy Tietze simplification: drop trivial and repeated relators, and eliminate a
/// generator occurring once in some relator, choosing the move that leaves the shortest
/// presentation. Moves that would push the total relator length above `max_length` are
/// not taken; if only such moves remain the best presentation so far comes back inside
/// [`Error::BudgetExceeded`].
pub fn tietze_simplify(pres: &Presentation, max_length: usize) -> Result<Presentation> {
    let mut cur = cleanup(pres);
    loop {
        let mut best: Option<Presentation> = None;
        let mut blocked = false;
        for (ri, r) in cur.relators.iter().enumerate() {
            for g in 0..cur.generators.len() {
                if r.occurrences(g) != 1 {
                    continue;
                }
                let cand = eliminate(&cur, ri, g);
                if cand.total_length() > max_length {
                    blocked = true;
                    continue;
                }
                let better = match &best {
                    None => true,
                    Some(b) => (cand.total_length(), cand.relators.len()) < (b.total_length(), b.relators.len()),
                };
                if better {
                    best = Some(cand);
                }
            }
        }
        match best {
            Some(b) => cur = b,
            None if blocked => return Err(Error::BudgetExceeded { best: Box::new(cur) }),
            None => return Ok(cur),
        }
    }
}

fn cleanup(pres: &Presentation) -> Presentation {
    let mut relators: Vec<FreeWord> = Vec::new();
    for r in &pres.relators {
        let r = r.cyclically_reduced();
        if r.is_empty() || relators.iter().any(|q| q.same_relator(&r)) {
            continue;
        }
        relators.push(r);
    }
    Presentation { generators: pres.generators.clone(), relators }
}

/// Solves relator `ri` for generator `g` (which occurs once) and substitutes.
fn eliminate(pres: &Presentation, ri: usize, g: usize) -> Presentation {
    let r = &pres.relators[ri];
    let pos = r.0.iter().position(|l| l.0 == g).unwrap();
    let u = FreeWord::new(r.0[..pos].iter().copied());
    let v = FreeWord::new(r.0[pos + 1..].iter().copied());
    // u x^e v = 1
    let value = if r.0[pos].1 > 0 { u.inverse().mul(&v.inverse()) } else { v.mul(&u) };
    let m = pres.generators.len();
    let images: Vec<FreeWord> = (0..m)
        .map(|h| {
            if h == g {
                value.clone()
            } else {
                FreeWord::generator(h)
            }
        })
        .collect();
    let renumber = |w: &FreeWord| FreeWord::new(w.0.iter().map(|&(h, e)| (if h > g { h - 1 } else { h }, e)));
    let relators = pres
        .relators
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != ri)
        .map(|(_, q)| renumber(&q.substitute(&images)))
        .collect();
    let mut generators = pres.generators.clone();
    generators.remove(g);
    cleanup(&Presentation { generators, relators })
}

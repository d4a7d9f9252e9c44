//! Multivariate Laurent polynomials over the integers.
//!
//! Variables are printed as `a, b, c, ...`. Exponent vectors all have length
//! `nvars`; mixing polynomials with different variable counts panics.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

pub type Exponent = Vec<i64>;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    nvars: usize,
    terms: BTreeMap<Exponent, BigInt>,
}

pub fn variable_name(i: usize) -> String {
    if i < 26 {
        ((b'a' + i as u8) as char).to_string()
    } else {
        format!("x{i}")
    }
}

impl LaurentPoly {
    pub fn zero(nvars: usize) -> Self {
        LaurentPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, BigInt::one())
    }

    pub fn constant(nvars: usize, c: impl Into<BigInt>) -> Self {
        Self::monomial(nvars, vec![0; nvars], c)
    }

    pub fn monomial(nvars: usize, exps: Exponent, c: impl Into<BigInt>) -> Self {
        assert_eq!(exps.len(), nvars);
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        LaurentPoly { nvars, terms }
    }

    /// The `i`-th variable.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(nvars, e, 1)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&vec![0; self.nvars]).map_or(false, |c| c.is_one())
    }

    /// Units of the Laurent ring are `±monomial`.
    pub fn is_unit(&self) -> bool {
        self.terms.len() == 1 && self.terms.values().next().unwrap().abs().is_one()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &BigInt)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &[i64]) -> BigInt {
        self.terms.get(exps).cloned().unwrap_or_default()
    }

    fn add_term(&mut self, exps: Exponent, c: BigInt) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exps) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        LaurentPoly { nvars: self.nvars, terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect() }
    }

    pub fn shift(&self, by: &[i64]) -> Self {
        let terms = self.terms.iter().map(|(e, c)| (add_exps(e, by), c.clone())).collect();
        LaurentPoly { nvars: self.nvars, terms }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::one(self.nvars);
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    /// Inverse of a unit, `None` otherwise.
    pub fn unit_inverse(&self) -> Option<Self> {
        if !self.is_unit() {
            return None;
        }
        let (e, c) = self.terms.iter().next().unwrap();
        Some(Self::monomial(self.nvars, e.iter().map(|x| -x).collect(), c.clone()))
    }

    /// Sends variable `i` to the monomial with exponents `images[i]`.
    pub fn substitute(&self, images: &[Exponent], target_nvars: usize) -> Self {
        assert_eq!(images.len(), self.nvars);
        let mut out = Self::zero(target_nvars);
        for (e, c) in &self.terms {
            let mut t = vec![0; target_nvars];
            for (i, &k) in e.iter().enumerate() {
                for (j, &m) in images[i].iter().enumerate() {
                    t[j] += k * m;
                }
            }
            out.add_term(t, c.clone());
        }
        out
    }

    /// Sum of coefficients.
    pub fn augmentation(&self) -> BigInt {
        self.terms.values().sum()
    }

    pub fn min_exponents(&self) -> Option<Exponent> {
        let mut it = self.terms.keys();
        let mut m = it.next()?.clone();
        for e in it {
            for (a, b) in m.iter_mut().zip(e) {
                *a = (*a).min(*b);
            }
        }
        Some(m)
    }

    pub fn max_exponents(&self) -> Option<Exponent> {
        let mut it = self.terms.keys();
        let mut m = it.next()?.clone();
        for e in it {
            for (a, b) in m.iter_mut().zip(e) {
                *a = (*a).max(*b);
            }
        }
        Some(m)
    }

    /// Width of the Newton polytope along each variable.
    pub fn spans(&self) -> Vec<i64> {
        match (self.min_exponents(), self.max_exponents()) {
            (Some(lo), Some(hi)) => hi.iter().zip(&lo).map(|(h, l)| h - l).collect(),
            _ => vec![0; self.nvars],
        }
    }

    fn integer_content(&self) -> BigInt {
        self.terms.values().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Terms in graded-lex order, largest first.
    fn graded_lex(&self) -> Vec<(&Exponent, &BigInt)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|(a, _), (b, _)| {
            let da: i64 = a.iter().sum();
            let db: i64 = b.iter().sum();
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        v
    }

    /// Representative of the class up to units: no negative exponents, every
    /// variable's minimum exponent is zero, leading graded-lex coefficient positive.
    pub fn normalized(&self) -> Self {
        let Some(lo) = self.min_exponents() else {
            return self.clone();
        };
        let neg: Vec<i64> = lo.iter().map(|x| -x).collect();
        let mut p = self.shift(&neg);
        if p.graded_lex()[0].1.is_negative() {
            p = -p;
        }
        p
    }

    pub fn eq_up_to_unit(&self, other: &Self) -> bool {
        self.normalized() == other.normalized()
    }

    /// Exact quotient `self / d`, or `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        assert_eq!(self.nvars, d.nvars);
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero(self.nvars));
        }
        if d.terms.len() == 1 {
            let (e, c) = d.terms.iter().next().unwrap();
            let mut terms = BTreeMap::new();
            for (x, k) in &self.terms {
                let (q, r) = k.div_rem(c);
                if !r.is_zero() {
                    return None;
                }
                terms.insert(sub_exps(x, e), q);
            }
            return Some(LaurentPoly { nvars: self.nvars, terms });
        }
        // Work with honest polynomials; d0 has no monomial factor, so
        // divisibility in the Laurent ring is divisibility of a0 by d0.
        let la = self.min_exponents().unwrap();
        let ld = d.min_exponents().unwrap();
        let a0 = self.shift(&neg_exps(&la));
        let d0 = d.shift(&neg_exps(&ld));
        let bound: Vec<i64> = a0
            .max_exponents()
            .unwrap()
            .iter()
            .zip(d0.max_exponents().unwrap())
            .map(|(a, b)| a - b)
            .collect();
        if bound.iter().any(|&b| b < 0) {
            return None;
        }
        let (lead_e, lead_c) = d0.terms.iter().next_back().unwrap();
        let mut r = a0;
        let mut q = Self::zero(self.nvars);
        while let Some((re, rc)) = r.terms.iter().next_back() {
            let qe = sub_exps(re, lead_e);
            if qe.iter().zip(&bound).any(|(x, b)| *x < 0 || x > b) {
                return None;
            }
            let (qc, rem) = rc.div_rem(lead_c);
            if !rem.is_zero() {
                return None;
            }
            for (e, c) in &d0.terms {
                r.add_term(add_exps(e, &qe), -(c * &qc));
            }
            q.add_term(qe, qc);
        }
        Some(q.shift(&sub_exps(&la, &ld)))
    }

    /// Greatest common divisor, normalized. `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        if self.is_zero() {
            return other.normalized();
        }
        if other.is_zero() {
            return self.normalized();
        }
        let a = self.normalized();
        let b = other.normalized();
        gcd_rec(&a, &b, self.nvars).normalized()
    }

    pub fn parse(s: &str, nvars: usize) -> Result<Self> {
        Parser { s: s.as_bytes(), pos: 0, nvars }.poly()
    }

    /// Renders with the given variable names.
    pub fn to_string_with(&self, names: &[&str]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (e, c)) in self.graded_lex().into_iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mut factors = Vec::new();
            for (j, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => factors.push(names[j].to_string()),
                    _ => factors.push(format!("{}^{}", names[j], k)),
                }
            }
            if factors.is_empty() {
                out.push_str(&abs.to_string());
            } else {
                if !abs.is_one() {
                    out.push_str(&abs.to_string());
                    out.push('*');
                }
                out.push_str(&factors.join("*"));
            }
        }
        out
    }
}

fn add_exps(a: &[i64], b: &[i64]) -> Exponent {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn sub_exps(a: &[i64], b: &[i64]) -> Exponent {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn neg_exps(a: &[i64]) -> Exponent {
    a.iter().map(|x| -x).collect()
}

// --- gcd ---------------------------------------------------------------

/// Coefficients of `p` as a polynomial in variable `v` (exponents nonnegative).
fn coeffs_in(p: &LaurentPoly, v: usize) -> Vec<LaurentPoly> {
    let deg = p.terms.keys().map(|e| e[v]).max().unwrap_or(0) as usize;
    let mut out = vec![LaurentPoly::zero(p.nvars); deg + 1];
    for (e, c) in &p.terms {
        let mut e2 = e.clone();
        e2[v] = 0;
        out[e[v] as usize].add_term(e2, c.clone());
    }
    out
}

fn assemble(cs: &[LaurentPoly], v: usize, nvars: usize) -> LaurentPoly {
    let mut out = LaurentPoly::zero(nvars);
    for (k, c) in cs.iter().enumerate() {
        for (e, x) in &c.terms {
            let mut e2 = e.clone();
            e2[v] = k as i64;
            out.add_term(e2, x.clone());
        }
    }
    out
}

fn trim(cs: &mut Vec<LaurentPoly>) {
    while cs.len() > 1 && cs.last().unwrap().is_zero() {
        cs.pop();
    }
}

fn is_constant(p: &LaurentPoly) -> bool {
    p.terms.len() == 1 && p.terms.keys().next().unwrap().iter().all(|&x| x == 0)
}

/// gcd of nonzero polynomials in variables `0..k`.
fn gcd_rec(a: &LaurentPoly, b: &LaurentPoly, k: usize) -> LaurentPoly {
    let n = a.nvars;
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    if k == 0 || is_constant(a) || is_constant(b) {
        let g = a.integer_content().gcd(&b.integer_content());
        return LaurentPoly::constant(n, g);
    }
    let v = k - 1;
    let ca = coeffs_in(a, v);
    let cb = coeffs_in(b, v);
    let cont_a = content(&ca, k - 1);
    let cont_b = content(&cb, k - 1);
    let g_cont = gcd_rec(&cont_a, &cont_b, k - 1);
    let mut f: Vec<LaurentPoly> = ca.iter().map(|c| c.div_exact(&cont_a).unwrap()).collect();
    let mut g: Vec<LaurentPoly> = cb.iter().map(|c| c.div_exact(&cont_b).unwrap()).collect();
    if f.len() < g.len() {
        std::mem::swap(&mut f, &mut g);
    }
    // Primitive remainder sequence.
    loop {
        if g.len() == 1 {
            // degree zero in v: primitive constant means the v-part is trivial
            return g_cont;
        }
        let mut r = prem(&f, &g);
        trim(&mut r);
        if r.len() == 1 && r[0].is_zero() {
            break;
        }
        let c = content(&r, k - 1);
        let r: Vec<LaurentPoly> = r.iter().map(|x| x.div_exact(&c).unwrap()).collect();
        f = std::mem::replace(&mut g, r);
    }
    &g_cont * &assemble(&g, v, n)
}

fn content(cs: &[LaurentPoly], k: usize) -> LaurentPoly {
    let mut g = LaurentPoly::zero(cs[0].nvars);
    for c in cs {
        if c.is_zero() {
            continue;
        }
        g = if g.is_zero() { c.clone() } else { gcd_rec(&g, c, k) };
        if is_constant(&g) && g.terms.values().next().unwrap().abs().is_one() {
            break;
        }
    }
    if g.is_zero() {
        return LaurentPoly::one(cs[0].nvars);
    }
    // keep a consistent sign so that division leaves a leading positive coefficient
    if g.graded_lex()[0].1.is_negative() {
        g = -g;
    }
    g
}

/// Pseudo-remainder of univariate polynomials over the coefficient ring.
fn prem(f: &[LaurentPoly], g: &[LaurentPoly]) -> Vec<LaurentPoly> {
    let n = g.len() - 1;
    let lc = g[n].clone();
    let mut r: Vec<LaurentPoly> = f.to_vec();
    trim(&mut r);
    while r.len() > n && !(r.len() == 1 && r[0].is_zero()) {
        let m = r.len() - 1;
        let lr = r[m].clone();
        let shift = m - n;
        for x in r.iter_mut() {
            *x = &*x * &lc;
        }
        for (i, gi) in g.iter().enumerate() {
            let t = gi * &lr;
            r[i + shift] = &r[i + shift] - &t;
        }
        debug_assert!(r[m].is_zero());
        r.pop();
        trim(&mut r);
        if r.is_empty() {
            r.push(LaurentPoly::zero(lc.nvars));
        }
    }
    r
}

// --- arithmetic --------------------------------------------------------

impl<'a> Add<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }
}

impl<'a> Mul<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = LaurentPoly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                out.add_term(add_exps(e1, e2), c1 * c2);
            }
        }
        out
    }
}

impl Add for LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: LaurentPoly) -> LaurentPoly {
        &self + &rhs
    }
}

impl Sub for LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: LaurentPoly) -> LaurentPoly {
        &self - &rhs
    }
}

impl Mul for LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: LaurentPoly) -> LaurentPoly {
        &self * &rhs
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(mut self) -> LaurentPoly {
        for c in self.terms.values_mut() {
            *c = -std::mem::take(c);
        }
        self
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -self.clone()
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.nvars).map(variable_name).collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        f.write_str(&self.to_string_with(&refs))
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

// --- parsing -----------------------------------------------------------

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    nvars: usize,
}

impl Parser<'_> {
    fn err(&self, what: &str) -> Error {
        Error::Parse(format!("{what} at byte {} of {:?}", self.pos, String::from_utf8_lossy(self.s)))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn int(&mut self) -> Option<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        std::str::from_utf8(&self.s[start..self.pos]).ok()?.parse().ok()
    }

    fn poly(&mut self) -> Result<LaurentPoly> {
        let mut out = LaurentPoly::zero(self.nvars);
        let mut first = true;
        loop {
            let sign = match self.peek() {
                None if !first => break,
                None => return Err(self.err("empty polynomial")),
                Some(b'+') => {
                    self.pos += 1;
                    1
                }
                Some(b'-') => {
                    self.pos += 1;
                    -1
                }
                Some(_) if first => 1,
                Some(_) => return Err(self.err("expected + or -")),
            };
            first = false;
            let (e, c) = self.term()?;
            out.add_term(e, c * sign);
        }
        Ok(out)
    }

    fn term(&mut self) -> Result<(Exponent, BigInt)> {
        let mut exps = vec![0; self.nvars];
        let mut coeff = BigInt::one();
        let mut any = false;
        if let Some(c) = self.int() {
            coeff = c;
            any = true;
            if self.peek() == Some(b'*') {
                self.pos += 1;
            } else if !matches!(self.peek(), Some(b'a'..=b'z')) {
                return Ok((exps, coeff));
            }
        }
        loop {
            match self.peek() {
                Some(ch @ b'a'..=b'z') => {
                    self.pos += 1;
                    let v = (ch - b'a') as usize;
                    if v >= self.nvars {
                        return Err(self.err("variable out of range"));
                    }
                    let mut k = 1i64;
                    if self.peek() == Some(b'^') {
                        self.pos += 1;
                        let neg = if self.peek() == Some(b'-') {
                            self.pos += 1;
                            true
                        } else {
                            false
                        };
                        let n = self.int().ok_or_else(|| self.err("expected exponent"))?;
                        let n: i64 = n.try_into().map_err(|_| self.err("exponent too large"))?;
                        k = if neg { -n } else { n };
                    }
                    exps[v] += k;
                    any = true;
                }
                _ => break,
            }
            if self.peek() == Some(b'*') {
                self.pos += 1;
            } else {
                break;
            }
        }
        if !any {
            return Err(self.err("expected a term"));
        }
        Ok((exps, coeff))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> LaurentPoly {
        LaurentPoly::parse(s, 2).unwrap()
    }

    #[test]
    fn parse_print_round_trip() {
        for s in ["a^2 - 3*a*b + 1", "-a^-1*b + 2", "0", "1 - a", "a^3*b^2 - 2*a"] {
            let x = p(s);
            assert_eq!(p(&x.to_string()), x, "{s}");
        }
        assert_eq!(p("1 - a").to_string(), "-a + 1");
        assert_eq!(p("b + a").to_string(), "a + b");
    }

    #[test]
    fn normalization() {
        assert_eq!(p("-a^-2 + a^-1").normalized(), p("a - 1"));
        assert!(p("a^3*b").is_unit());
        assert!(p("a^2 + 2*a + 1").eq_up_to_unit(&p("-a^-1 - 2 - a")));
    }

    #[test]
    fn exact_division() {
        let f = p("a^2 - 1");
        assert_eq!(f.div_exact(&p("a - 1")), Some(p("a + 1")));
        assert_eq!(f.div_exact(&p("a - 2")), None);
        assert_eq!(p("2*a*b").div_exact(&p("2*b")), Some(p("a")));
        let g = p("a^-1 - b");
        assert_eq!((&g * &f).div_exact(&g), Some(f.clone()));
    }

    #[test]
    fn gcds() {
        let x = p("a - 1");
        let y = p("a + b");
        let z = p("a^2 - a + 1");
        assert_eq!((&x * &y).gcd(&(&x * &z)), x.normalized());
        assert!((&y * &z).gcd(&x).is_one());
        assert_eq!(p("6*a - 6").gcd(&p("4*a^2 - 4")), p("2*a - 2"));
        assert_eq!(p("a^3 - a").gcd(&p("a^-2")), LaurentPoly::one(2));
        assert_eq!(p("0").gcd(&p("-a + 1")), p("a - 1"));
    }
}

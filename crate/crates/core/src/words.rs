//! Finite words, eventually periodic sequences and digit streams over
//! `{0, …, M}`.
//!
//! Positions are zero-based in code: position `0` holds the first digit
//! `d_1`. Eventually periodic sequences are kept in canonical form (primitive
//! period, minimal preperiod), so structural equality is sequence equality.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};

pub type Digit = u8;

/// The digit set `{0, …, M}` with `M ≥ 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Alphabet(u8);

impl Alphabet {
    pub fn new(m: u32) -> Result<Self> {
        if m == 0 || m > u8::MAX as u32 - 1 {
            return Err(Error::Domain(format!("largest digit M must be in 1..=254, got {m}")));
        }
        Ok(Alphabet(m as u8))
    }

    /// Largest digit.
    pub fn m(self) -> Digit {
        self.0
    }

    pub fn size(self) -> u32 {
        self.0 as u32 + 1
    }

    fn check(self, digits: &[Digit]) -> Result<()> {
        match digits.iter().find(|&&d| d > self.0) {
            Some(d) => Err(Error::Domain(format!("digit {d} exceeds M = {}", self.0))),
            None => Ok(()),
        }
    }
}

fn write_digits(f: &mut fmt::Formatter<'_>, digits: &[Digit], m: Alphabet) -> fmt::Result {
    if m.m() <= 9 {
        for d in digits {
            write!(f, "{d}")?;
        }
    } else {
        for (i, d) in digits.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{d}")?;
        }
    }
    Ok(())
}

fn parse_digits(s: &str, m: Alphabet) -> Result<Vec<Digit>> {
    let out: Result<Vec<Digit>> = if m.m() > 9 {
        s.split(',')
            .map(|t| t.trim().parse::<Digit>().map_err(|_| Error::Parse(format!("bad digit {t:?}"))))
            .collect()
    } else {
        s.chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| {
                c.to_digit(10)
                    .map(|d| d as Digit)
                    .ok_or_else(|| Error::Parse(format!("bad digit {c:?}")))
            })
            .collect()
    };
    let out = out?;
    m.check(&out)?;
    Ok(out)
}

/// A finite word; may be empty.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Word {
    digits: Vec<Digit>,
    m: Alphabet,
}

impl Word {
    pub fn new(digits: Vec<Digit>, m: Alphabet) -> Result<Self> {
        m.check(&digits)?;
        Ok(Word { digits, m })
    }

    pub fn empty(m: Alphabet) -> Self {
        Word { digits: Vec::new(), m }
    }

    pub fn parse(s: &str, m: Alphabet) -> Result<Self> {
        Ok(Word {
            digits: parse_digits(s, m)?,
            m,
        })
    }

    pub fn alphabet(&self) -> Alphabet {
        self.m
    }

    pub fn digits(&self) -> &[Digit] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn reflect(&self) -> Word {
        Word {
            digits: self.digits.iter().map(|d| self.m.m() - d).collect(),
            m: self.m,
        }
    }

    /// Increase the last digit; requires it to be below `M`.
    pub fn plus_one(&self) -> Result<Word> {
        match self.digits.last() {
            Some(&d) if d < self.m.m() => {
                let mut digits = self.digits.clone();
                *digits.last_mut().unwrap() += 1;
                Ok(Word { digits, m: self.m })
            }
            Some(_) => Err(Error::Precondition("plus_one: last digit is already M".into())),
            None => Err(Error::Precondition("plus_one of the empty word".into())),
        }
    }

    /// Decrease the last digit; requires it to be positive.
    pub fn minus_one(&self) -> Result<Word> {
        match self.digits.last() {
            Some(&d) if d > 0 => {
                let mut digits = self.digits.clone();
                *digits.last_mut().unwrap() -= 1;
                Ok(Word { digits, m: self.m })
            }
            Some(_) => Err(Error::Precondition("minus_one: last digit is already 0".into())),
            None => Err(Error::Precondition("minus_one of the empty word".into())),
        }
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut digits = self.digits.clone();
        digits.extend_from_slice(&other.digits);
        Word { digits, m: self.m }
    }

    pub fn repeat(&self, k: usize) -> Word {
        Word {
            digits: self.digits.repeat(k),
            m: self.m,
        }
    }

    pub fn prefix(&self, n: usize) -> Word {
        Word {
            digits: self.digits[..n.min(self.len())].to_vec(),
            m: self.m,
        }
    }

    /// `w^∞`; fails on the empty word.
    pub fn periodic(&self) -> Result<EventuallyPeriodicWord> {
        EventuallyPeriodicWord::new(Vec::new(), self.digits.clone(), self.m)
    }

    /// `w 0^∞`.
    pub fn then_zeros(&self) -> EventuallyPeriodicWord {
        EventuallyPeriodicWord::canonical(self.digits.clone(), vec![0], self.m)
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.digits.cmp(&other.digits)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_digits(f, &self.digits, self.m)
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word(")?;
        write_digits(f, &self.digits, self.m)?;
        write!(f, ")")
    }
}

/// `preperiod · period^∞` in canonical form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct EventuallyPeriodicWord {
    pre: Vec<Digit>,
    period: Vec<Digit>,
    m: Alphabet,
}

fn primitive_root(p: &[Digit]) -> &[Digit] {
    let n = p.len();
    for d in 1..n {
        if n % d == 0 && (d..n).all(|i| p[i] == p[i - d]) {
            return &p[..d];
        }
    }
    p
}

impl EventuallyPeriodicWord {
    pub fn new(pre: Vec<Digit>, period: Vec<Digit>, m: Alphabet) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::Domain("period must be nonempty".into()));
        }
        m.check(&pre)?;
        m.check(&period)?;
        Ok(Self::canonical(pre, period, m))
    }

    pub fn from_words(pre: &Word, period: &Word) -> Result<Self> {
        Self::new(pre.digits.clone(), period.digits.clone(), pre.m)
    }

    fn canonical(mut pre: Vec<Digit>, period: Vec<Digit>, m: Alphabet) -> Self {
        let mut period = primitive_root(&period).to_vec();
        while let (Some(&a), Some(&b)) = (pre.last(), period.last()) {
            if a != b {
                break;
            }
            pre.pop();
            period.rotate_right(1);
        }
        EventuallyPeriodicWord { pre, period, m }
    }

    /// `M^∞`.
    pub fn constant(d: Digit, m: Alphabet) -> Self {
        Self::canonical(Vec::new(), vec![d], m)
    }

    /// Parse `pre(period)`; a bare word means that word followed by `0^∞`.
    pub fn parse(s: &str, m: Alphabet) -> Result<Self> {
        let s = s.trim();
        match s.find('(') {
            Some(i) => {
                let rest = s[i + 1..]
                    .strip_suffix(')')
                    .ok_or_else(|| Error::Parse(format!("missing ')' in {s:?}")))?;
                let pre = parse_digits(&s[..i], m)?;
                let period = parse_digits(rest, m)?;
                Self::new(pre, period, m)
            }
            None => Ok(Self::canonical(parse_digits(s, m)?, vec![0], m)),
        }
    }

    pub fn alphabet(&self) -> Alphabet {
        self.m
    }

    pub fn preperiod(&self) -> Word {
        Word {
            digits: self.pre.clone(),
            m: self.m,
        }
    }

    pub fn period(&self) -> Word {
        Word {
            digits: self.period.clone(),
            m: self.m,
        }
    }

    pub fn preperiod_len(&self) -> usize {
        self.pre.len()
    }

    pub fn period_len(&self) -> usize {
        self.period.len()
    }

    /// Digit at zero-based position `i`.
    pub fn digit(&self, i: usize) -> Digit {
        if i < self.pre.len() {
            self.pre[i]
        } else {
            self.period[(i - self.pre.len()) % self.period.len()]
        }
    }

    pub fn prefix(&self, n: usize) -> Word {
        Word {
            digits: (0..n).map(|i| self.digit(i)).collect(),
            m: self.m,
        }
    }

    pub fn ends_with_zeros(&self) -> bool {
        self.period == [0]
    }

    pub fn is_zero(&self) -> bool {
        self.pre.is_empty() && self.ends_with_zeros()
    }

    pub fn reflect(&self) -> Self {
        let m = self.m.m();
        EventuallyPeriodicWord {
            pre: self.pre.iter().map(|d| m - d).collect(),
            period: self.period.iter().map(|d| m - d).collect(),
            m: self.m,
        }
    }

    /// `σ^n`.
    pub fn shift(&self, n: usize) -> Self {
        if n <= self.pre.len() {
            return EventuallyPeriodicWord {
                pre: self.pre[n..].to_vec(),
                period: self.period.clone(),
                m: self.m,
            };
        }
        let mut period = self.period.clone();
        period.rotate_left((n - self.pre.len()) % self.period.len());
        EventuallyPeriodicWord {
            pre: Vec::new(),
            period,
            m: self.m,
        }
    }

    /// `w · self`.
    pub fn prepend(&self, w: &Word) -> Self {
        let mut pre = w.digits.clone();
        pre.extend_from_slice(&self.pre);
        Self::canonical(pre, self.period.clone(), self.m)
    }

    /// Number of positions after which two sequences must agree forever if
    /// they agree so far.
    fn decision_depth(&self, other: &Self) -> usize {
        self.pre.len().max(other.pre.len()) + self.period.len().lcm(&other.period.len())
    }

    /// Zero-based position of the first difference, `None` when equal.
    pub fn first_difference(&self, other: &Self) -> Option<usize> {
        if self == other {
            return None;
        }
        (0..self.decision_depth(other)).find(|&i| self.digit(i) != other.digit(i))
    }

    /// `ρ(a, b) = (M+1)^{-i}` with `i` the one-based index of the first
    /// difference; zero for equal sequences.
    pub fn metric_rho(&self, other: &Self) -> BigRational {
        match self.first_difference(other) {
            None => BigRational::from_integer(0.into()),
            Some(i) => BigRational::new(BigInt::one(), BigInt::from(self.m.size()).pow(i as u32 + 1)),
        }
    }

    /// Distinct tails `σ^n(self)` for `n ≥ 1`, paired with the digit `d_n`
    /// just before each tail.
    pub fn tails(&self) -> impl Iterator<Item = (Digit, EventuallyPeriodicWord)> + '_ {
        (1..=self.pre.len() + self.period.len()).map(move |n| (self.digit(n - 1), self.shift(n)))
    }

    /// `σ^n(a) ≼ a` for all `n ≥ 0` and `a` does not end with `0^∞`.
    pub fn is_alpha_admissible(&self) -> bool {
        !self.ends_with_zeros() && self.tails().all(|(_, t)| t <= *self)
    }

    pub fn to_stream(&self) -> DigitStream {
        let w = self.clone();
        DigitStream::new(self.m, move |i| w.digit(i))
    }
}

impl PartialOrd for EventuallyPeriodicWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for EventuallyPeriodicWord {
    /// Exact lexicographic order.
    fn cmp(&self, other: &Self) -> Ordering {
        match self.first_difference(other) {
            None => Ordering::Equal,
            Some(i) => self.digit(i).cmp(&other.digit(i)),
        }
    }
}

impl fmt::Display for EventuallyPeriodicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_digits(f, &self.pre, self.m)?;
        write!(f, "(")?;
        write_digits(f, &self.period, self.m)?;
        write!(f, ")")
    }
}

impl fmt::Debug for EventuallyPeriodicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Epw({self})")
    }
}

/// An infinite sequence given by a digit function.
#[derive(Clone)]
pub struct DigitStream {
    f: Arc<dyn Fn(usize) -> Digit + Send + Sync>,
    m: Alphabet,
}

impl DigitStream {
    /// `f(i)` is the digit at zero-based position `i`; it must not exceed `M`.
    pub fn new<F>(m: Alphabet, f: F) -> Self
    where
        F: Fn(usize) -> Digit + Send + Sync + 'static,
    {
        DigitStream { f: Arc::new(f), m }
    }

    pub fn alphabet(&self) -> Alphabet {
        self.m
    }

    pub fn digit(&self, i: usize) -> Digit {
        (self.f)(i)
    }

    pub fn prefix(&self, n: usize) -> Word {
        Word {
            digits: (0..n).map(|i| self.digit(i)).collect(),
            m: self.m,
        }
    }

    pub fn shift(&self, n: usize) -> DigitStream {
        let f = self.f.clone();
        DigitStream::new(self.m, move |i| f(i + n))
    }

    pub fn reflect(&self) -> DigitStream {
        let f = self.f.clone();
        let m = self.m.m();
        DigitStream::new(self.m, move |i| m - f(i))
    }
}

impl fmt::Debug for DigitStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DigitStream({}…)", self.prefix(16))
    }
}

/// Either kind of infinite sequence.
#[derive(Clone, Debug)]
pub enum Sequence {
    Periodic(EventuallyPeriodicWord),
    Stream(DigitStream),
}

impl Sequence {
    pub fn digit(&self, i: usize) -> Digit {
        match self {
            Sequence::Periodic(w) => w.digit(i),
            Sequence::Stream(s) => s.digit(i),
        }
    }

    pub fn alphabet(&self) -> Alphabet {
        match self {
            Sequence::Periodic(w) => w.alphabet(),
            Sequence::Stream(s) => s.alphabet(),
        }
    }

    pub fn shift(&self, n: usize) -> Sequence {
        match self {
            Sequence::Periodic(w) => Sequence::Periodic(w.shift(n)),
            Sequence::Stream(s) => Sequence::Stream(s.shift(n)),
        }
    }

    pub fn reflect(&self) -> Sequence {
        match self {
            Sequence::Periodic(w) => Sequence::Periodic(w.reflect()),
            Sequence::Stream(s) => Sequence::Stream(s.reflect()),
        }
    }

    pub fn prefix(&self, n: usize) -> Word {
        match self {
            Sequence::Periodic(w) => w.prefix(n),
            Sequence::Stream(s) => s.prefix(n),
        }
    }
}

impl From<EventuallyPeriodicWord> for Sequence {
    fn from(w: EventuallyPeriodicWord) -> Self {
        Sequence::Periodic(w)
    }
}

impl From<DigitStream> for Sequence {
    fn from(s: DigitStream) -> Self {
        Sequence::Stream(s)
    }
}

/// `τ_i`, the parity of the number of ones in the binary expansion of `i`.
pub fn thue_morse(i: usize) -> Digit {
    (i.count_ones() & 1) as Digit
}

/// `τ_1 τ_2 τ_3 … = 1101 0011 …` over `{0, 1}`.
pub fn thue_morse_shift() -> DigitStream {
    DigitStream::new(Alphabet(1), |i| thue_morse(i + 1))
}

/// Result of a lexicographic comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LexOrder {
    Less,
    Equal,
    Greater,
    /// No difference within the first `n` digits; only for streams.
    TiedThrough(usize),
}

impl From<Ordering> for LexOrder {
    fn from(o: Ordering) -> Self {
        match o {
            Ordering::Less => LexOrder::Less,
            Ordering::Equal => LexOrder::Equal,
            Ordering::Greater => LexOrder::Greater,
        }
    }
}

/// Exact for two eventually periodic sequences; otherwise decided within
/// `depth_hint` digits or reported as tied through that depth.
pub fn lex_compare(a: &Sequence, b: &Sequence, depth_hint: usize) -> LexOrder {
    if let (Sequence::Periodic(x), Sequence::Periodic(y)) = (a, b) {
        return x.cmp(y).into();
    }
    for i in 0..depth_hint {
        match a.digit(i).cmp(&b.digit(i)) {
            Ordering::Equal => continue,
            o => return o.into(),
        }
    }
    LexOrder::TiedThrough(depth_hint)
}

/// `ρ(a, b)`, exact for eventually periodic input. For streams tied through
/// `depth`, returns `None`: the distance is then only known to be below
/// `(M+1)^{-depth}`.
pub fn metric_rho(a: &Sequence, b: &Sequence, depth: usize) -> Option<BigRational> {
    if let (Sequence::Periodic(x), Sequence::Periodic(y)) = (a, b) {
        return Some(x.metric_rho(y));
    }
    let base = BigInt::from(a.alphabet().size());
    (0..depth)
        .find(|&i| a.digit(i) != b.digit(i))
        .map(|i| BigRational::new(BigInt::one(), base.pow(i as u32 + 1)))
}

//! Words over a fixed generator alphabet and finitely presented groups.

use std::collections::BTreeMap;
use std::fmt;

/// One generator occurrence; `inv` marks the inverse letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub gen: usize,
    pub inv: bool,
}

impl Letter {
    pub fn new(gen: usize, inv: bool) -> Self {
        Letter { gen, inv }
    }

    pub fn inverse(self) -> Self {
        Letter { gen: self.gen, inv: !self.inv }
    }

    /// Column index in a coset table: `2g` for `g`, `2g+1` for `g⁻¹`.
    pub fn column(self) -> usize {
        2 * self.gen + self.inv as usize
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn gen(g: usize) -> Self {
        Word(vec![Letter::new(g, false)])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn pow(&self, e: i64) -> Word {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut v = Vec::with_capacity(base.len() * e.unsigned_abs() as usize);
        for _ in 0..e.unsigned_abs() {
            v.extend_from_slice(&base.0);
        }
        Word(v)
    }

    /// `[a,b] = a⁻¹b⁻¹ab`.
    pub fn commutator(a: &Word, b: &Word) -> Word {
        a.inverse().concat(&b.inverse()).concat(a).concat(b)
    }

    pub fn max_gen(&self) -> Option<usize> {
        self.0.iter().map(|l| l.gen).max()
    }
}

/// Free reduction.
pub fn reduce(w: &Word) -> Word {
    let mut out: Vec<Letter> = Vec::with_capacity(w.len());
    for &l in &w.0 {
        if out.last() == Some(&l.inverse()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    Word(out)
}

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum FpError {
    #[error("no image given for generator {0}")]
    MissingImage(usize),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("duplicate generator name `{0}`")]
    DuplicateName(String),
    #[error("generator index {0} out of range")]
    OutOfRange(usize),
}

/// Replace every letter by its image (inverted for inverse letters), then reduce.
pub fn substitute(w: &Word, images: &BTreeMap<usize, Word>) -> Result<Word, FpError> {
    let mut v = Vec::new();
    for l in &w.0 {
        let img = images.get(&l.gen).ok_or(FpError::MissingImage(l.gen))?;
        if l.inv {
            v.extend(img.inverse().0);
        } else {
            v.extend_from_slice(&img.0);
        }
    }
    Ok(reduce(&Word(v)))
}

/// Same as [`substitute`] with images indexed by generator position.
pub fn substitute_all(w: &Word, images: &[Word]) -> Result<Word, FpError> {
    let map: BTreeMap<usize, Word> = images.iter().cloned().enumerate().collect();
    substitute(w, &map)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub gens: Vec<String>,
    pub relators: Vec<Word>,
    pub subgroups: BTreeMap<String, Vec<Word>>,
    pub metadata: String,
}

impl Presentation {
    pub fn new(gens: &[&str]) -> Result<Self, FpError> {
        let mut seen = std::collections::BTreeSet::new();
        for g in gens {
            if !seen.insert(*g) {
                return Err(FpError::DuplicateName(g.to_string()));
            }
        }
        Ok(Presentation {
            gens: gens.iter().map(|s| s.to_string()).collect(),
            relators: Vec::new(),
            subgroups: BTreeMap::new(),
            metadata: String::new(),
        })
    }

    pub fn ngens(&self) -> usize {
        self.gens.len()
    }

    pub fn gen_index(&self, name: &str) -> Option<usize> {
        self.gens.iter().position(|g| g == name)
    }

    pub fn parse_word(&self, s: &str) -> Result<Word, FpError> {
        WordParser { src: s.as_bytes(), pos: 0, gens: &self.gens }.parse_all()
    }

    pub fn add_relator(&mut self, s: &str) -> Result<(), FpError> {
        let w = self.parse_word(s)?;
        self.relators.push(w);
        Ok(())
    }

    pub fn set_subgroup(&mut self, label: &str, words: &[&str]) -> Result<(), FpError> {
        let ws = words.iter().map(|w| self.parse_word(w)).collect::<Result<Vec<_>, _>>()?;
        self.subgroups.insert(label.to_string(), ws);
        Ok(())
    }

    pub fn subgroup(&self, label: &str) -> Option<&[Word]> {
        self.subgroups.get(label).map(|v| v.as_slice())
    }

    pub fn validate(&self) -> Result<(), FpError> {
        let n = self.ngens();
        let all = self.relators.iter().chain(self.subgroups.values().flatten());
        for w in all {
            if let Some(g) = w.max_gen() {
                if g >= n {
                    return Err(FpError::OutOfRange(g));
                }
            }
        }
        Ok(())
    }

    pub fn format_word(&self, w: &Word) -> String {
        if w.is_empty() {
            return "1".into();
        }
        let mut out = String::new();
        let ls = w.letters();
        let mut i = 0;
        while i < ls.len() {
            let mut j = i;
            while j < ls.len() && ls[j] == ls[i] {
                j += 1;
            }
            let run = (j - i) as i64;
            out.push_str(&self.gens[ls[i].gen]);
            let e = if ls[i].inv { -run } else { run };
            if e != 1 {
                out.push('^');
                out.push_str(&e.to_string());
            }
            i = j;
        }
        out
    }

    /// The sub-presentation on the listed generators, keeping only relators
    /// that mention nothing else.
    pub fn restrict(&self, keep: &[usize]) -> Presentation {
        let pos: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(i, &g)| (g, i)).collect();
        let relators = self
            .relators
            .iter()
            .filter(|w| w.letters().iter().all(|l| pos.contains_key(&l.gen)))
            .map(|w| Word(w.letters().iter().map(|l| Letter::new(pos[&l.gen], l.inv)).collect()))
            .collect();
        Presentation {
            gens: keep.iter().map(|&g| self.gens[g].clone()).collect(),
            relators,
            subgroups: BTreeMap::new(),
            metadata: String::new(),
        }
    }

    /// Text form: a `gens` line, then one relator per line.
    pub fn to_text(&self) -> String {
        let mut s = format!("gens {}\n", self.gens.join(" "));
        for r in &self.relators {
            s.push_str(&self.format_word(r));
            s.push('\n');
        }
        s
    }

    /// Parse the text form written by [`Presentation::to_text`]. Blank lines
    /// and `#` comments are skipped.
    pub fn from_text(text: &str) -> Result<Presentation, FpError> {
        let mut lines = text
            .lines()
            .map(|l| l.split('#').next().unwrap().trim())
            .filter(|l| !l.is_empty());
        let head = lines.next().ok_or(FpError::Parse { pos: 0, msg: "empty input".into() })?;
        let names: Vec<&str> = head
            .strip_prefix("gens")
            .ok_or(FpError::Parse { pos: 0, msg: "expected `gens`".into() })?
            .split_whitespace()
            .collect();
        let mut p = Presentation::new(&names)?;
        for l in lines {
            p.add_relator(l)?;
        }
        Ok(p)
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rels: Vec<String> = self.relators.iter().map(|r| self.format_word(r)).collect();
        write!(f, "<{} | {}>", self.gens.join(","), rels.join(", "))
    }
}

/// Grammar: `word := factor*`, `factor := atom ('^' int)?`,
/// `atom := name | '(' word ')' | '[' word ',' word ']' | '1'`.
/// Names are a letter followed by optional digits or underscores.
struct WordParser<'a> {
    src: &'a [u8],
    pos: usize,
    gens: &'a [String],
}

impl WordParser<'_> {
    fn err<T>(&self, msg: &str) -> Result<T, FpError> {
        Err(FpError::Parse { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && matches!(self.src[self.pos], b' ' | b'\t' | b'*' | b'.') {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn parse_all(mut self) -> Result<Word, FpError> {
        let w = self.word()?;
        if self.peek().is_some() {
            return self.err("trailing input");
        }
        Ok(reduce(&w))
    }

    fn word(&mut self) -> Result<Word, FpError> {
        let mut w = Word::empty();
        while let Some(c) = self.peek() {
            if c == b')' || c == b']' || c == b',' {
                break;
            }
            let f = self.factor()?;
            w = w.concat(&f);
        }
        Ok(w)
    }

    fn factor(&mut self) -> Result<Word, FpError> {
        let a = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            if self.src.get(self.pos) == Some(&b'-') {
                self.pos += 1;
            }
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let txt = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
            let e: i64 = match txt.parse() {
                Ok(e) => e,
                Err(_) => return self.err("bad exponent"),
            };
            return Ok(a.pow(e));
        }
        Ok(a)
    }

    fn atom(&mut self) -> Result<Word, FpError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let w = self.word()?;
                if self.peek() != Some(b')') {
                    return self.err("expected `)`");
                }
                self.pos += 1;
                Ok(w)
            }
            Some(b'[') => {
                self.pos += 1;
                let a = self.word()?;
                if self.peek() != Some(b',') {
                    return self.err("expected `,`");
                }
                self.pos += 1;
                let b = self.word()?;
                if self.peek() != Some(b']') {
                    return self.err("expected `]`");
                }
                self.pos += 1;
                Ok(Word::commutator(&a, &b))
            }
            Some(b'1') => {
                self.pos += 1;
                Ok(Word::empty())
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                self.pos += 1;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                match self.gens.iter().position(|g| g == name) {
                    Some(i) => Ok(Word::gen(i)),
                    None => Err(FpError::UnknownSymbol(name.to_string())),
                }
            }
            Some(_) => Err(FpError::UnknownSymbol(
                String::from_utf8_lossy(&self.src[self.pos..self.pos + 1]).into_owned(),
            )),
            None => self.err("unexpected end of input"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn djm1() -> Presentation {
        let mut p = Presentation::new(&["h", "a"]).unwrap();
        p.add_relator("h^3").unwrap();
        p.add_relator("a^2").unwrap();
        p
    }

    #[test]
    fn reduce_cancels_pairs() {
        let p = Presentation::new(&["x"]).unwrap();
        let w = Word(vec![Letter::new(0, false), Letter::new(0, true)]);
        assert!(reduce(&w).is_empty());
        assert!(reduce(&Word::empty()).is_empty());
        let q = djm1();
        let raw = Word(vec![
            Letter::new(1, false),
            Letter::new(0, true),
            Letter::new(0, false),
            Letter::new(1, false),
        ]);
        assert_eq!(q.format_word(&reduce(&raw)), "a^2");
        assert_eq!(p.format_word(&Word::empty()), "1");
    }

    #[test]
    fn substitute_standard_generators() {
        let q = djm1();
        let images = vec![q.parse_word("h").unwrap(), q.parse_word("aha").unwrap()];
        let x = Word::gen(0);
        assert_eq!(substitute_all(&x, &images).unwrap(), q.parse_word("h").unwrap());
        let yinv = Word::gen(1).inverse();
        assert_eq!(q.format_word(&substitute_all(&yinv, &images).unwrap()), "a^-1h^-1a^-1");
        assert!(substitute_all(&Word::empty(), &images).unwrap().is_empty());
        let missing = BTreeMap::new();
        assert_eq!(substitute(&x, &missing), Err(FpError::MissingImage(0)));
    }

    #[test]
    fn parser_handles_sugar() {
        let p = Presentation::new(&["c", "d", "y"]).unwrap();
        assert_eq!(p.format_word(&p.parse_word("[c,d]").unwrap()), "c^-1d^-1cd");
        assert_eq!(p.format_word(&p.parse_word("(dy^-1)^2").unwrap()), "dy^-1dy^-1");
        assert_eq!(p.format_word(&p.parse_word("d^-1 y^-1").unwrap()), "d^-1y^-1");
        assert!(matches!(p.parse_word("cz"), Err(FpError::UnknownSymbol(s)) if s == "z"));
        assert!(p.parse_word("(cd").is_err());
        assert!(p.parse_word("c^").is_err());
        assert!(Presentation::new(&["a", "a"]).is_err());
    }

    #[test]
    fn text_round_trip() {
        let mut p = Presentation::new(&["c", "x"]).unwrap();
        for r in ["c^2", "x^3", "(cx)^2"] {
            p.add_relator(r).unwrap();
        }
        let q = Presentation::from_text(&p.to_text()).unwrap();
        assert_eq!(p.gens, q.gens);
        assert_eq!(p.relators, q.relators);
    }

    fn arb_word(ngens: usize) -> impl Strategy<Value = Word> {
        prop::collection::vec((0..ngens, any::<bool>()), 0..24)
            .prop_map(|v| Word(v.into_iter().map(|(g, i)| Letter::new(g, i)).collect()))
    }

    proptest! {
        #[test]
        fn reduce_idempotent(w in arb_word(3)) {
            let r = reduce(&w);
            prop_assert_eq!(reduce(&r), r.clone());
            prop_assert!(r.len() <= w.len());
            prop_assert!(reduce(&w.concat(&w.inverse())).is_empty());
        }

        #[test]
        fn substitute_is_homomorphic(u in arb_word(2), v in arb_word(2),
                                     i0 in arb_word(3), i1 in arb_word(3)) {
            let images = vec![i0, i1];
            let suv = substitute_all(&u.concat(&v), &images).unwrap();
            let su = substitute_all(&u, &images).unwrap();
            let sv = substitute_all(&v, &images).unwrap();
            prop_assert_eq!(suv, reduce(&su.concat(&sv)));
            let sinv = substitute_all(&u.inverse(), &images).unwrap();
            prop_assert_eq!(sinv, reduce(&su.inverse()));
        }
    }
}

use std::fmt;

use super::unitary::Unitary2;

/// Clifford+T single-qubit gate symbols.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    H,
    S,
    Sdg,
    T,
    Tdg,
    X,
    Y,
    Z,
}

impl Symbol {
    pub const ALL: [Symbol; 8] =
        [Symbol::H, Symbol::S, Symbol::Sdg, Symbol::T, Symbol::Tdg, Symbol::X, Symbol::Y, Symbol::Z];

    pub fn matrix(self) -> Unitary2 {
        match self {
            Symbol::H => Unitary2::h(),
            Symbol::X => Unitary2::x(),
            Symbol::Y => Unitary2::y(),
            other => Unitary2::t_power(other.t_power().expect("diagonal symbol")),
        }
    }

    pub fn inverse(self) -> Symbol {
        match self {
            Symbol::S => Symbol::Sdg,
            Symbol::Sdg => Symbol::S,
            Symbol::T => Symbol::Tdg,
            Symbol::Tdg => Symbol::T,
            other => other,
        }
    }

    /// Exponent `k` with the symbol equal to `T^k` exactly, for diagonal symbols.
    fn t_power(self) -> Option<u8> {
        match self {
            Symbol::T => Some(1),
            Symbol::S => Some(2),
            Symbol::Z => Some(4),
            Symbol::Sdg => Some(6),
            Symbol::Tdg => Some(7),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Symbol::H => "H",
            Symbol::S => "S",
            Symbol::Sdg => "Sdg",
            Symbol::T => "T",
            Symbol::Tdg => "Tdg",
            Symbol::X => "X",
            Symbol::Y => "Y",
            Symbol::Z => "Z",
        }
    }

    pub fn parse(s: &str) -> Option<Symbol> {
        Symbol::ALL.into_iter().find(|sym| sym.name().eq_ignore_ascii_case(s))
    }
}

/// `T^k` written with as few symbols as the table allows.
fn diagonal_word(k: u8) -> &'static [Symbol] {
    match k % 8 {
        0 => &[],
        1 => &[Symbol::T],
        2 => &[Symbol::S],
        3 => &[Symbol::S, Symbol::T],
        4 => &[Symbol::Z],
        5 => &[Symbol::Z, Symbol::T],
        6 => &[Symbol::Sdg],
        _ => &[Symbol::Tdg],
    }
}

/// A gate word in circuit order: the first symbol acts first, so the
/// matrix of `[a, b]` is `b · a`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GateWord(Vec<Symbol>);

#[derive(Clone, Copy, PartialEq, Eq)]
enum Token {
    Diag(u8),
    Other(Symbol),
}

impl GateWord {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    /// Canonical form of an arbitrary symbol sequence.
    pub fn from_symbols(symbols: impl IntoIterator<Item = Symbol>) -> Self {
        Self(symbols.into_iter().collect()).canonical()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of `T` and `T†` symbols.
    pub fn t_count(&self) -> usize {
        self.0.iter().filter(|s| matches!(s, Symbol::T | Symbol::Tdg)).count()
    }

    pub fn matrix(&self) -> Unitary2 {
        self.0.iter().fold(Unitary2::identity(), |acc, s| s.matrix() * acc)
    }

    pub fn inverse(&self) -> GateWord {
        GateWord(self.0.iter().rev().map(|s| s.inverse()).collect())
    }

    /// Concatenation `self` then `other`, canonicalised.
    pub fn then(&self, other: &GateWord) -> GateWord {
        GateWord(self.0.iter().chain(&other.0).copied().collect()).canonical()
    }

    pub fn push(&self, s: Symbol) -> GateWord {
        self.then(&GateWord(vec![s]))
    }

    /// Merges runs of diagonal symbols into a single power of `T` and cancels
    /// `HH`, `XX`, `YY`. Every rewrite is an exact matrix identity.
    pub fn canonical(&self) -> GateWord {
        let mut stack: Vec<Token> = Vec::with_capacity(self.0.len());
        for &s in &self.0 {
            let token = match s.t_power() {
                Some(k) => Token::Diag(k),
                None => Token::Other(s),
            };
            match (stack.last().copied(), token) {
                (Some(Token::Diag(a)), Token::Diag(b)) => {
                    stack.pop();
                    let k = (a + b) % 8;
                    if k != 0 {
                        stack.push(Token::Diag(k));
                    }
                }
                (Some(Token::Other(a)), Token::Other(b)) if a == b => {
                    stack.pop();
                }
                _ => stack.push(token),
            }
        }
        let mut out = Vec::with_capacity(stack.len());
        for t in stack {
            match t {
                Token::Diag(k) => out.extend_from_slice(diagonal_word(k)),
                Token::Other(s) => out.push(s),
            }
        }
        GateWord(out)
    }
}

impl fmt::Display for GateWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("I");
        }
        let names: Vec<&str> = self.0.iter().map(|s| s.name()).collect();
        f.write_str(&names.join(" "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(s: &[Symbol]) -> GateWord {
        GateWord(s.to_vec())
    }

    #[test]
    fn rewrite_table() {
        use Symbol::*;
        assert_eq!(w(&[S, S]).canonical(), w(&[Z]));
        assert_eq!(w(&[T, T]).canonical(), w(&[S]));
        assert_eq!(w(&[T, Tdg]).canonical(), w(&[]));
        assert_eq!(w(&[H, H]).canonical(), w(&[]));
        assert_eq!(w(&[H, T, Tdg, H, X]).canonical(), w(&[X]));
        assert_eq!(w(&[T, T, T]).canonical(), w(&[S, T]));
        assert_eq!(w(&[Z, S, T]).canonical(), w(&[Tdg]));
    }

    #[test]
    fn circuit_order() {
        use Symbol::*;
        let m = w(&[H, T]).matrix();
        let expected = T.matrix() * H.matrix();
        assert_eq!(m, expected);
        assert_eq!(w(&[H, T, S]).inverse(), w(&[Sdg, Tdg, H]));
        assert!(w(&[H, T, S]).then(&w(&[H, T, S]).inverse()).is_empty());
    }

    #[test]
    fn t_count_includes_daggers() {
        use Symbol::*;
        assert_eq!(w(&[T, H, Tdg, S, H, T]).t_count(), 3);
        assert_eq!(format!("{}", w(&[H, Tdg])), "H Tdg");
        assert_eq!(format!("{}", GateWord::new()), "I");
        assert_eq!(Symbol::parse("tdg"), Some(Tdg));
    }

    fn symbol() -> impl Strategy<Value = Symbol> {
        (0usize..8).prop_map(|i| Symbol::ALL[i])
    }

    proptest! {
        #[test]
        fn canonicalisation_preserves_unitary(syms in prop::collection::vec(symbol(), 0..=30)) {
            let raw = w(&syms);
            let canon = raw.canonical();
            prop_assert!(canon.len() <= raw.len());
            prop_assert!(raw.matrix().distance(&canon.matrix()) < 1e-12);
            prop_assert_eq!(canon.canonical(), canon.clone());
            prop_assert!(canon.symbols().windows(2).all(|p| p[1] != p[0].inverse()));
        }
    }
}

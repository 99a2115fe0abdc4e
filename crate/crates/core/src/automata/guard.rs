use std::fmt;

/// A letter of `2^AP`: bit `i` is set iff proposition `i` holds.
pub type Letter = u64;

/// Boolean edge label over proposition indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Guard {
    True,
    False,
    Ap(usize),
    Not(Box<Guard>),
    And(Vec<Guard>),
    Or(Vec<Guard>),
}

impl Guard {
    pub fn not(g: Guard) -> Guard {
        Guard::Not(Box::new(g))
    }

    /// Conjunction; a single operand is returned as is.
    pub fn and(mut v: Vec<Guard>) -> Guard {
        match v.len() {
            0 => Guard::True,
            1 => v.pop().unwrap(),
            _ => Guard::And(v),
        }
    }

    /// Disjunction; a single operand is returned as is.
    pub fn or(mut v: Vec<Guard>) -> Guard {
        match v.len() {
            0 => Guard::False,
            1 => v.pop().unwrap(),
            _ => Guard::Or(v),
        }
    }

    /// The conjunction of literals that holds exactly on `letter`.
    pub fn minterm(letter: Letter, num_ap: usize) -> Guard {
        Guard::and(
            (0..num_ap)
                .map(|i| {
                    if letter >> i & 1 == 1 {
                        Guard::Ap(i)
                    } else {
                        Guard::not(Guard::Ap(i))
                    }
                })
                .collect(),
        )
    }

    /// A guard holding exactly on the given letters.
    pub fn from_letters(letters: &[Letter], num_ap: usize) -> Guard {
        if letters.len() as u64 == 1u64 << num_ap {
            return Guard::True;
        }
        Guard::or(letters.iter().map(|&l| Guard::minterm(l, num_ap)).collect())
    }

    pub fn eval(&self, letter: Letter) -> bool {
        match self {
            Guard::True => true,
            Guard::False => false,
            Guard::Ap(i) => letter >> i & 1 == 1,
            Guard::Not(g) => !g.eval(letter),
            Guard::And(v) => v.iter().all(|g| g.eval(letter)),
            Guard::Or(v) => v.iter().any(|g| g.eval(letter)),
        }
    }

    /// Largest proposition index mentioned.
    pub fn max_ap(&self) -> Option<usize> {
        match self {
            Guard::True | Guard::False => None,
            Guard::Ap(i) => Some(*i),
            Guard::Not(g) => g.max_ap(),
            Guard::And(v) | Guard::Or(v) => v.iter().filter_map(Guard::max_ap).max(),
        }
    }

    /// Letters of `2^AP` satisfying the guard.
    pub fn letters(&self, num_ap: usize) -> impl Iterator<Item = Letter> + '_ {
        (0..1u64 << num_ap).filter(move |&l| self.eval(l))
    }
}

impl fmt::Display for Guard {
    /// HOA label syntax: `t`, `f`, proposition numbers, `!`, `&`, `|`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn operand(g: &Guard, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match g {
                Guard::And(_) | Guard::Or(_) => write!(f, "({g})"),
                _ => write!(f, "{g}"),
            }
        }
        match self {
            Guard::True => write!(f, "t"),
            Guard::False => write!(f, "f"),
            Guard::Ap(i) => write!(f, "{i}"),
            Guard::Not(g) => {
                write!(f, "!")?;
                operand(g, f)
            }
            Guard::And(v) | Guard::Or(v) => {
                let sep = if matches!(self, Guard::And(_)) { " & " } else { " | " };
                for (k, g) in v.iter().enumerate() {
                    if k > 0 {
                        write!(f, "{sep}")?;
                    }
                    operand(g, f)?;
                }
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_and_print() {
        let g = Guard::and(vec![Guard::Ap(0), Guard::not(Guard::or(vec![Guard::Ap(1), Guard::Ap(2)]))]);
        assert!(g.eval(0b001));
        assert!(!g.eval(0b011));
        assert_eq!(g.to_string(), "0 & !(1 | 2)");
        assert_eq!(g.max_ap(), Some(2));
    }

    #[test]
    fn letters_round_trip() {
        let g = Guard::or(vec![Guard::Ap(0), Guard::Ap(1)]);
        let ls: Vec<Letter> = g.letters(2).collect();
        assert_eq!(ls, vec![1, 2, 3]);
        let h = Guard::from_letters(&ls, 2);
        assert!((0..4).all(|l| g.eval(l) == h.eval(l)));
        assert_eq!(Guard::from_letters(&[0, 1, 2, 3], 2), Guard::True);
        assert_eq!(Guard::from_letters(&[], 2), Guard::False);
    }
}

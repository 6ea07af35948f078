//! The 24-element single-qubit Clifford group, stored as conjugation images.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::pauli::Pauli;

/// A Hermitian single-qubit Pauli with sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SignedPauli {
    pub letter: Pauli,
    pub negative: bool,
}

impl SignedPauli {
    pub const fn plus(letter: Pauli) -> Self {
        Self {
            letter,
            negative: false,
        }
    }

    pub const fn minus(letter: Pauli) -> Self {
        Self {
            letter,
            negative: true,
        }
    }
}

impl fmt::Display for SignedPauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", if self.negative { '-' } else { '+' }, self.letter)
    }
}

/// Single-qubit Clifford `U`, identified by `U X U†` and `U Z U†`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SingleQubitClifford {
    image_x: SignedPauli,
    image_z: SignedPauli,
}

impl SingleQubitClifford {
    pub const IDENTITY: Self = Self {
        image_x: SignedPauli::plus(Pauli::X),
        image_z: SignedPauli::plus(Pauli::Z),
    };
    pub const H: Self = Self {
        image_x: SignedPauli::plus(Pauli::Z),
        image_z: SignedPauli::plus(Pauli::X),
    };
    pub const S: Self = Self {
        image_x: SignedPauli::plus(Pauli::Y),
        image_z: SignedPauli::plus(Pauli::Z),
    };
    pub const S_DAG: Self = Self {
        image_x: SignedPauli::minus(Pauli::Y),
        image_z: SignedPauli::plus(Pauli::Z),
    };
    pub const X: Self = Self {
        image_x: SignedPauli::plus(Pauli::X),
        image_z: SignedPauli::minus(Pauli::Z),
    };
    pub const Y: Self = Self {
        image_x: SignedPauli::minus(Pauli::X),
        image_z: SignedPauli::minus(Pauli::Z),
    };
    pub const Z: Self = Self {
        image_x: SignedPauli::minus(Pauli::X),
        image_z: SignedPauli::plus(Pauli::Z),
    };

    /// Returns `None` unless the two images anticommute.
    pub fn from_images(image_x: SignedPauli, image_z: SignedPauli) -> Option<Self> {
        let valid = image_x.letter != Pauli::I
            && image_z.letter != Pauli::I
            && image_x.letter != image_z.letter;
        valid.then_some(Self { image_x, image_z })
    }

    pub fn image_x(&self) -> SignedPauli {
        self.image_x
    }

    pub fn image_z(&self) -> SignedPauli {
        self.image_z
    }

    /// `U Y U†`, derived from `Y = iXZ`.
    pub fn image_y(&self) -> SignedPauli {
        let (k, letter) = self.image_x.letter.mul(self.image_z.letter);
        // i · i^k is ±1 because the images anticommute (k odd)
        let negative = ((1 + k) & 3 == 2) ^ self.image_x.negative ^ self.image_z.negative;
        SignedPauli { letter, negative }
    }

    /// `U P U†` for a bare letter.
    pub fn conjugate(&self, p: Pauli) -> SignedPauli {
        match p {
            Pauli::I => SignedPauli::plus(Pauli::I),
            Pauli::X => self.image_x,
            Pauli::Y => self.image_y(),
            Pauli::Z => self.image_z,
        }
    }

    pub fn conjugate_signed(&self, p: SignedPauli) -> SignedPauli {
        let mut out = self.conjugate(p.letter);
        out.negative ^= p.negative;
        out
    }

    /// The Clifford obtained by applying `self` first and `next` afterwards.
    pub fn then(&self, next: &Self) -> Self {
        Self {
            image_x: next.conjugate_signed(self.image_x),
            image_z: next.conjugate_signed(self.image_z),
        }
    }

    pub fn inverse(&self) -> Self {
        *Self::all()
            .iter()
            .find(|c| self.then(c) == Self::IDENTITY)
            .expect("group is closed under inverses")
    }

    /// True for the four Pauli elements (images are `±X`, `±Z`).
    pub fn is_pauli(&self) -> bool {
        self.image_x.letter == Pauli::X && self.image_z.letter == Pauli::Z
    }

    /// All 24 elements in a fixed order (identity first).
    pub fn all() -> &'static [SingleQubitClifford; 24] {
        static ALL: OnceLock<[SingleQubitClifford; 24]> = OnceLock::new();
        ALL.get_or_init(|| {
            let mut out = Vec::with_capacity(24);
            for &ax in &Pauli::NON_IDENTITY {
                for &az in &Pauli::NON_IDENTITY {
                    if ax == az {
                        continue;
                    }
                    for sx in [false, true] {
                        for sz in [false, true] {
                            out.push(SingleQubitClifford {
                                image_x: SignedPauli { letter: ax, negative: sx },
                                image_z: SignedPauli { letter: az, negative: sz },
                            });
                        }
                    }
                }
            }
            out.sort_by_key(|c| c.name() != "I");
            out.try_into().unwrap()
        })
    }

    /// Shortest gate word over `X, Y, Z, H, S, Sdg` (applied left to right,
    /// space separated) that realises this element; `"I"` for the identity.
    pub fn name(&self) -> &'static str {
        names()
            .iter()
            .find(|(c, _)| c == self)
            .map(|(_, n)| n.as_str())
            .expect("every element is named")
    }

    /// Finds an element with `U from_x U† = +X` and `U from_z U† = +Z`.
    pub fn mapping_to_xz(from_x: Pauli, from_z: Pauli) -> Option<Self> {
        Self::all().iter().copied().find(|c| {
            c.conjugate(from_x) == SignedPauli::plus(Pauli::X)
                && c.conjugate(from_z) == SignedPauli::plus(Pauli::Z)
        })
    }
}

const ALPHABET: [(&str, SingleQubitClifford); 6] = [
    ("X", SingleQubitClifford::X),
    ("Y", SingleQubitClifford::Y),
    ("Z", SingleQubitClifford::Z),
    ("H", SingleQubitClifford::H),
    ("S", SingleQubitClifford::S),
    ("Sdg", SingleQubitClifford::S_DAG),
];

fn names() -> &'static Vec<(SingleQubitClifford, String)> {
    static NAMES: OnceLock<Vec<(SingleQubitClifford, String)>> = OnceLock::new();
    NAMES.get_or_init(|| {
        let mut found = vec![(SingleQubitClifford::IDENTITY, "I".to_string())];
        let mut frontier = found.clone();
        while found.len() < 24 {
            let mut next = Vec::new();
            for (c, word) in &frontier {
                for (gname, g) in &ALPHABET {
                    let d = c.then(g);
                    if found.iter().chain(&next).all(|(e, _)| *e != d) {
                        let w = if word == "I" {
                            gname.to_string()
                        } else {
                            format!("{word} {gname}")
                        };
                        next.push((d, w));
                    }
                }
            }
            found.extend(next.iter().cloned());
            frontier = next;
        }
        found
    })
}

impl fmt::Display for SingleQubitClifford {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SingleQubitClifford {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut acc = SingleQubitClifford::IDENTITY;
        for tok in s.split_whitespace() {
            if tok == "I" {
                continue;
            }
            let g = ALPHABET
                .iter()
                .find(|(n, _)| *n == tok)
                .map(|(_, g)| *g)
                .ok_or_else(|| format!("unknown gate {tok:?} in {s:?}"))?;
            acc = acc.then(&g);
        }
        Ok(acc)
    }
}

impl Serialize for SingleQubitClifford {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for SingleQubitClifford {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

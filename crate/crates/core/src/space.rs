//! Categorical search spaces and the transforms acting on them.
//!
//! Categories are dense indices `0..g_i`. Names, when a space description
//! provides them, are interned at ingestion and never reach the kernels.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::rng::{permutation, seeded, SeededRng};

/// `X = X_1 × … × X_n` with `g_i = |X_i| >= 2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SearchSpace {
    cards: Vec<usize>,
    names: Option<Vec<Vec<String>>>,
}

#[derive(Deserialize)]
struct SpaceFile {
    cardinalities: Option<Vec<usize>>,
    categories: Option<Vec<Vec<String>>>,
}

impl SearchSpace {
    pub fn new(cards: Vec<usize>) -> Result<Self> {
        if cards.is_empty() {
            return Err(Error::invalid("search space needs at least one dimension"));
        }
        if let Some((i, g)) = cards.iter().enumerate().find(|(_, &g)| g < 2) {
            return Err(Error::invalid(format!(
                "dimension {i} has {g} categories, need at least 2"
            )));
        }
        Ok(Self { cards, names: None })
    }

    /// `n` dimensions with `g` categories each.
    pub fn uniform(n: usize, g: usize) -> Result<Self> {
        Self::new(vec![g; n])
    }

    pub fn binary(n: usize) -> Result<Self> {
        Self::uniform(n, 2)
    }

    /// Builds a space with category names; cardinalities follow the lists.
    pub fn with_names(names: Vec<Vec<String>>) -> Result<Self> {
        let mut space = Self::new(names.iter().map(Vec::len).collect())?;
        for (i, list) in names.iter().enumerate() {
            let mut seen = HashMap::new();
            for (c, name) in list.iter().enumerate() {
                if let Some(prev) = seen.insert(name.as_str(), c) {
                    return Err(Error::invalid(format!(
                        "dimension {i}: category `{name}` listed twice ({prev} and {c})"
                    )));
                }
            }
        }
        space.names = Some(names);
        Ok(space)
    }

    /// Parses a space description:
    ///
    /// ```toml
    /// cardinalities = [2, 3, 5]
    /// # or, with names (cardinalities then optional but must agree)
    /// categories = [["a", "b"], ["x", "y", "z"], ["1", "2", "3", "4", "5"]]
    /// ```
    pub fn from_description(text: &str) -> Result<Self> {
        let file: SpaceFile = toml::from_str(text).map_err(|e| Error::Parse {
            line: e
                .span()
                .map(|s| text[..s.start].lines().count().max(1))
                .unwrap_or(0),
            msg: e.message().to_string(),
        })?;
        match (file.cardinalities, file.categories) {
            (Some(cards), None) => Self::new(cards),
            (cards, Some(names)) => {
                let space = Self::with_names(names)?;
                if let Some(cards) = cards {
                    if cards != space.cards {
                        return Err(Error::invalid(
                            "cardinalities disagree with the category lists",
                        ));
                    }
                }
                Ok(space)
            }
            (None, None) => Err(Error::invalid(
                "space description needs `cardinalities` or `categories`",
            )),
        }
    }

    pub fn cardinalities(&self) -> &[usize] {
        &self.cards
    }

    pub fn cardinality(&self, dim: usize) -> usize {
        self.cards[dim]
    }

    pub fn dims(&self) -> usize {
        self.cards.len()
    }

    /// Width `s = Σ g_i` of the one-hot encoding.
    pub fn one_hot_width(&self) -> usize {
        self.cards.iter().sum()
    }

    pub fn equal_sized(&self) -> bool {
        self.cards.windows(2).all(|w| w[0] == w[1])
    }

    /// `|X|`, or `None` if it overflows `usize`.
    pub fn num_points(&self) -> Option<usize> {
        self.cards.iter().try_fold(1usize, |acc, &g| acc.checked_mul(g))
    }

    pub fn contains(&self, x: &Point) -> bool {
        x.0.len() == self.cards.len() && x.0.iter().zip(&self.cards).all(|(&c, &g)| c < g)
    }

    pub fn check(&self, x: &Point) -> Result<()> {
        if x.0.len() != self.cards.len() {
            return Err(Error::invalid(format!(
                "point has {} coordinates, space has {} dimensions",
                x.0.len(),
                self.cards.len()
            )));
        }
        for (i, (&c, &g)) in x.0.iter().zip(&self.cards).enumerate() {
            if c >= g {
                return Err(Error::invalid(format!(
                    "coordinate {i} = {c} outside 0..{g}"
                )));
            }
        }
        Ok(())
    }

    /// Index of a named category, when the space carries names.
    pub fn category_index(&self, dim: usize, name: &str) -> Option<usize> {
        self.names
            .as_ref()?
            .get(dim)?
            .iter()
            .position(|n| n == name)
    }

    pub fn category_name(&self, dim: usize, idx: usize) -> Option<&str> {
        self.names.as_ref()?.get(dim)?.get(idx).map(String::as_str)
    }

    /// Point at mixed-radix position `idx`; the last dimension varies fastest.
    pub fn point_at(&self, mut idx: usize) -> Point {
        let mut coords = vec![0; self.cards.len()];
        for (c, &g) in coords.iter_mut().zip(&self.cards).rev() {
            *c = idx % g;
            idx /= g;
        }
        Point(coords)
    }

    /// Mixed-radix position of `x`, inverse of [`point_at`](Self::point_at).
    pub fn index_of(&self, x: &Point) -> usize {
        x.0.iter()
            .zip(&self.cards)
            .fold(0, |acc, (&c, &g)| acc * g + c)
    }

    /// All points in lexicographic order. Panics if `|X|` overflows.
    pub fn enumerate(&self) -> impl Iterator<Item = Point> + '_ {
        let total = self.num_points().expect("space too large to enumerate");
        (0..total).map(move |i| self.point_at(i))
    }

    pub fn random_point(&self, rng: &mut SeededRng) -> Point {
        Point(self.cards.iter().map(|&g| rng.random_range(0..g)).collect())
    }
}

/// A point of a [`SearchSpace`]: one category index per dimension.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point(pub Vec<usize>);

impl Point {
    pub fn coords(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Serializes with an arbitrary separator (`,` for points, `;` in traces).
    pub fn join(&self, sep: &str) -> String {
        self.0
            .iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(sep)
    }

    pub fn parse_with(s: &str, sep: char) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Point(Vec::new()));
        }
        s.split(sep)
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|e| Error::invalid(format!("bad coordinate `{t}`: {e}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Point)
    }
}

impl From<Vec<usize>> for Point {
    fn from(v: Vec<usize>) -> Self {
        Point(v)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.join(","))
    }
}

impl FromStr for Point {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Point::parse_with(s, ',')
    }
}

/// Number of coordinates in which `x` and `y` differ. Lengths must match.
#[inline]
pub(crate) fn mismatches(x: &[usize], y: &[usize]) -> usize {
    x.iter().zip(y).filter(|(a, b)| a != b).count()
}

/// Hamming distance `h(x, y) = n − Σ δ(x_i, y_i)`.
pub fn hamming_distance(x: &Point, y: &Point) -> Result<usize> {
    if x.len() != y.len() {
        return Err(Error::invalid(format!(
            "dimension mismatch: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    Ok(mismatches(&x.0, &y.0))
}

/// One-hot encoding: one block of `g_i` bits per dimension.
pub fn one_hot(space: &SearchSpace, x: &Point) -> Result<Vec<u8>> {
    space.check(x)?;
    let mut out = vec![0u8; space.one_hot_width()];
    let mut offset = 0;
    for (&c, &g) in x.0.iter().zip(&space.cards) {
        out[offset + c] = 1;
        offset += g;
    }
    Ok(out)
}

fn invert_map(map: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; map.len()];
    for (a, &b) in map.iter().enumerate() {
        inv[b] = a;
    }
    inv
}

fn is_permutation(map: &[usize]) -> bool {
    let mut seen = vec![false; map.len()];
    map.iter()
        .all(|&v| v < map.len() && !std::mem::replace(&mut seen[v], true))
}

/// Fixed per-dimension category bijections `θ_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relocation {
    maps: Vec<Vec<usize>>,
    inverse: Vec<Vec<usize>>,
    seed: Option<u64>,
}

impl Relocation {
    pub fn identity(space: &SearchSpace) -> Self {
        let maps: Vec<Vec<usize>> = space.cards.iter().map(|&g| (0..g).collect()).collect();
        Self {
            inverse: maps.clone(),
            maps,
            seed: None,
        }
    }

    pub fn from_maps(space: &SearchSpace, maps: Vec<Vec<usize>>) -> Result<Self> {
        if maps.len() != space.dims() {
            return Err(Error::invalid("one bijection per dimension required"));
        }
        for (i, (m, &g)) in maps.iter().zip(&space.cards).enumerate() {
            if m.len() != g || !is_permutation(m) {
                return Err(Error::invalid(format!(
                    "map for dimension {i} is not a permutation of 0..{g}"
                )));
            }
        }
        let inverse = maps.iter().map(|m| invert_map(m)).collect();
        Ok(Self {
            maps,
            inverse,
            seed: None,
        })
    }

    pub fn maps(&self) -> &[Vec<usize>] {
        &self.maps
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn is_identity(&self) -> bool {
        self.maps
            .iter()
            .all(|m| m.iter().enumerate().all(|(a, &b)| a == b))
    }

    /// `x ↦ (θ_1(x_1), …, θ_n(x_n))`.
    pub fn apply(&self, x: &Point) -> Point {
        Point(x.0.iter().zip(&self.maps).map(|(&c, m)| m[c]).collect())
    }

    pub fn invert(&self, x: &Point) -> Point {
        Point(x.0.iter().zip(&self.inverse).map(|(&c, m)| m[c]).collect())
    }
}

/// Samples a relocation: binary dimensions flip with probability 0.5,
/// larger dimensions get a uniform permutation of their categories.
pub fn sample_relocation(space: &SearchSpace, seed: u64) -> Relocation {
    let mut rng = seeded(seed);
    let maps: Vec<Vec<usize>> = space
        .cards
        .iter()
        .map(|&g| {
            if g == 2 {
                if rng.random_bool(0.5) {
                    vec![1, 0]
                } else {
                    vec![0, 1]
                }
            } else {
                permutation(&mut rng, g)
            }
        })
        .collect();
    let inverse = maps.iter().map(|m| invert_map(m)).collect();
    Relocation {
        maps,
        inverse,
        seed: Some(seed),
    }
}

/// Hamming-graph automorphism `x ↦ (θ_1(x_σ(1)), …, θ_n(x_σ(n)))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automorphism {
    sigma: Vec<usize>,
    thetas: Vec<Vec<usize>>,
}

impl Automorphism {
    pub fn new(space: &SearchSpace, sigma: Vec<usize>, thetas: Vec<Vec<usize>>) -> Result<Self> {
        let n = space.dims();
        if sigma.len() != n || thetas.len() != n || !is_permutation(&sigma) {
            return Err(Error::invalid("sigma must be a permutation of the dimensions"));
        }
        for i in 0..n {
            // θ_i maps X_σ(i) onto X_i
            let g = space.cards[i];
            if space.cards[sigma[i]] != g {
                return Err(Error::invalid(format!(
                    "sigma mixes dimensions {i} and {} of different sizes",
                    sigma[i]
                )));
            }
            if thetas[i].len() != g || !is_permutation(&thetas[i]) {
                return Err(Error::invalid(format!(
                    "theta for dimension {i} is not a permutation of 0..{g}"
                )));
            }
        }
        Ok(Self { sigma, thetas })
    }

    pub fn identity(space: &SearchSpace) -> Self {
        Self {
            sigma: (0..space.dims()).collect(),
            thetas: space.cards.iter().map(|&g| (0..g).collect()).collect(),
        }
    }

    pub fn sigma(&self) -> &[usize] {
        &self.sigma
    }

    pub fn thetas(&self) -> &[Vec<usize>] {
        &self.thetas
    }

    pub fn apply(&self, x: &Point) -> Point {
        Point(
            self.sigma
                .iter()
                .zip(&self.thetas)
                .map(|(&s, theta)| theta[x.0[s]])
                .collect(),
        )
    }

    pub fn inverse(&self) -> Self {
        let sigma_inv = invert_map(&self.sigma);
        let thetas = sigma_inv
            .iter()
            .map(|&si| invert_map(&self.thetas[si]))
            .collect();
        Self {
            sigma: sigma_inv,
            thetas,
        }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        // (a∘b)(x)_i = θa_i(θb_σa(i)(x_σb(σa(i))))
        let sigma = self.sigma.iter().map(|&s| other.sigma[s]).collect();
        let thetas = self
            .sigma
            .iter()
            .zip(&self.thetas)
            .map(|(&s, ta)| other.thetas[s].iter().map(|&v| ta[v]).collect())
            .collect();
        Self { sigma, thetas }
    }
}

/// Uniform element of `S_g^n ⋊ S_n` for equal-sized spaces, otherwise of
/// `S_g1 × … × S_gn` with `σ` the identity.
pub fn sample_automorphism(space: &SearchSpace, seed: u64) -> Automorphism {
    let mut rng = seeded(seed);
    let sigma = if space.equal_sized() {
        permutation(&mut rng, space.dims())
    } else {
        (0..space.dims()).collect()
    };
    let thetas = space
        .cards
        .iter()
        .map(|&g| permutation(&mut rng, g))
        .collect();
    Automorphism { sigma, thetas }
}

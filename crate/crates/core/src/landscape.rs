//! NK fitness landscapes.
//!
//! A string `x = (x_1, ..., x_N)` is stored in the low `N` bits of a `u32`,
//! with `x_1` in bit 0. Component `i` reads the window
//! `(x_i, x_{i+1}, ..., x_{i+K})` (indices modulo `N`) and packs it into a
//! pattern value with `x_i` as the least significant bit. Its contribution is
//! `tables[i][pattern]`, and the fitness is the mean of the `N` contributions.
//!
//! Tables are drawn from the [`Stream::Landscape`] stream of the landscape
//! seed, row-major: component 0 patterns `0..2^(K+1)`, then component 1, and
//! so on. Each entry is one `f64` uniform on `[0, 1)`.

use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::OnceLock;

use rand::Rng as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rng::{stream_rng, Stream};

/// Largest supported string length.
pub const MAX_N: usize = 30;
/// Largest string length for which all `2^N` fitnesses may be tabulated.
pub const MAX_TABULATED_N: usize = 24;

/// A binary string of length `N <= 30`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct BitString {
    bits: u32,
    len: u8,
}

impl BitString {
    pub fn new(bits: u32, len: usize) -> Result<Self> {
        if len == 0 || len > MAX_N {
            return Err(Error::param(format!(
                "string length {len} outside 1..={MAX_N}"
            )));
        }
        if bits >> len != 0 {
            return Err(Error::param(format!(
                "bits {bits:#x} do not fit in length {len}"
            )));
        }
        Ok(Self::from_raw(bits, len))
    }

    /// Unchecked constructor; `bits` must fit in `len` bits.
    #[inline]
    pub(crate) fn from_raw(bits: u32, len: usize) -> Self {
        debug_assert!((1..=MAX_N).contains(&len) && bits >> len == 0);
        Self {
            bits,
            len: len as u8,
        }
    }

    pub fn zeros(len: usize) -> Result<Self> {
        Self::new(0, len)
    }

    /// Uniform string: one `u32` draw masked to `len` bits.
    pub fn random<R: rand::Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        Self::from_raw(rng.next_u32() & mask(len), len)
    }

    #[inline]
    pub fn bits(self) -> u32 {
        self.bits
    }

    #[inline]
    pub fn len(self) -> usize {
        self.len as usize
    }

    #[inline]
    pub fn get(self, i: usize) -> bool {
        assert!(i < self.len(), "bit {i} out of range");
        self.bits >> i & 1 == 1
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len(), "bit {i} out of range");
        self.bits ^= 1 << i;
    }

    #[inline]
    pub fn flipped(mut self, i: usize) -> Self {
        self.flip(i);
        self
    }

    pub fn hamming(self, other: BitString) -> u32 {
        debug_assert_eq!(self.len, other.len);
        (self.bits ^ other.bits).count_ones()
    }
}

#[inline]
pub(crate) fn mask(len: usize) -> u32 {
    if len >= 32 {
        u32::MAX
    } else {
        (1u32 << len) - 1
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len() {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl FromStr for BitString {
    type Err = Error;

    /// Parses `x_1 x_2 ... x_N` written as a run of `0`/`1` characters.
    fn from_str(s: &str) -> Result<Self> {
        let mut bits = 0u32;
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' if i < MAX_N => bits |= 1 << i,
                '1' => {}
                _ => return Err(Error::param(format!("invalid bit character {c:?}"))),
            }
        }
        Self::new(bits, s.chars().count())
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// An NK landscape. Immutable after generation.
#[derive(Clone)]
pub struct Landscape {
    n: usize,
    k: usize,
    seed: u64,
    /// `n` rows of `2^(k+1)` entries, row-major.
    tables: Vec<f64>,
    table_cache: OnceLock<Vec<f64>>,
    max_cache: OnceLock<(BitString, f64)>,
}

impl fmt::Debug for Landscape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Landscape")
            .field("n", &self.n)
            .field("k", &self.k)
            .field("seed", &self.seed)
            .finish_non_exhaustive()
    }
}

impl PartialEq for Landscape {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.k == other.k
            && self.seed == other.seed
            && self
                .tables
                .iter()
                .zip(&other.tables)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

fn check_nk(n: usize, k: usize) -> Result<()> {
    if n == 0 || n > MAX_N {
        return Err(Error::param(format!("N = {n} outside 1..={MAX_N}")));
    }
    if k >= n {
        return Err(Error::param(format!(
            "K = {k} outside 0..=N-1 = 0..={}",
            n - 1
        )));
    }
    Ok(())
}

/// Generates the landscape for `(n, k, seed)`.
pub fn generate_landscape(n: usize, k: usize, seed: u64) -> Result<Landscape> {
    check_nk(n, k)?;
    let mut rng = stream_rng(seed, Stream::Landscape);
    let tables = (0..n << (k + 1)).map(|_| rng.random::<f64>()).collect();
    Ok(Landscape::from_parts(n, k, seed, tables))
}

impl Landscape {
    fn from_parts(n: usize, k: usize, seed: u64, tables: Vec<f64>) -> Self {
        Self {
            n,
            k,
            seed,
            tables,
            table_cache: OnceLock::new(),
            max_cache: OnceLock::new(),
        }
    }

    /// Builds a landscape from explicit component tables (`tables[i][pattern]`).
    pub fn from_tables(k: usize, seed: u64, tables: Vec<Vec<f64>>) -> Result<Self> {
        let n = tables.len();
        check_nk(n, k)?;
        let width = 1usize << (k + 1);
        let mut flat = Vec::with_capacity(n * width);
        for (i, row) in tables.into_iter().enumerate() {
            if row.len() != width {
                return Err(Error::param(format!(
                    "table {i} has {} entries, expected {width}",
                    row.len()
                )));
            }
            if let Some(v) = row.iter().find(|v| !(0.0..1.0).contains(*v)) {
                return Err(Error::param(format!("table {i} entry {v} outside [0, 1)")));
            }
            flat.extend(row);
        }
        Ok(Self::from_parts(n, k, seed, flat))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Entries per component table, `2^(K+1)`.
    pub fn table_width(&self) -> usize {
        1 << (self.k + 1)
    }

    /// Component table `i`, indexed by pattern value.
    pub fn component(&self, i: usize) -> &[f64] {
        let w = self.table_width();
        &self.tables[i * w..(i + 1) * w]
    }

    pub fn components(&self) -> impl Iterator<Item = &[f64]> {
        self.tables.chunks(self.table_width())
    }

    /// Size of the solution space, `2^N`.
    pub fn space_size(&self) -> u64 {
        1u64 << self.n
    }

    /// Fitness of the string with raw bits `x`, evaluated from the tables.
    #[inline]
    pub fn fitness_raw(&self, x: u32) -> f64 {
        let n = self.n;
        let w = self.table_width();
        let window = mask(self.k + 1) as u64;
        let x = x as u64;
        // doubled string so a right shift by i yields the cyclic window at i
        let doubled = x | (x << n);
        let mut sum = 0.0;
        for i in 0..n {
            let pattern = ((doubled >> i) & window) as usize;
            sum += self.tables[i * w + pattern];
        }
        sum / n as f64
    }

    pub fn fitness(&self, x: BitString) -> Result<f64> {
        if x.len() != self.n {
            return Err(Error::param(format!(
                "string length {} does not match N = {}",
                x.len(),
                self.n
            )));
        }
        Ok(self.fitness_raw(x.bits()))
    }

    /// Fitness of every string, indexed by raw bits. Built on first use and
    /// bit-identical to [`Landscape::fitness_raw`].
    pub fn fitness_table(&self) -> Result<&[f64]> {
        if self.n > MAX_TABULATED_N {
            return Err(Error::Capability(format!(
                "cannot tabulate 2^{} fitnesses (limit N = {MAX_TABULATED_N})",
                self.n
            )));
        }
        Ok(self
            .table_cache
            .get_or_init(|| (0..1u32 << self.n).map(|x| self.fitness_raw(x)).collect()))
    }

    /// The global maximum and its fitness.
    ///
    /// For `K = 0` each bit is set independently to the better of its two
    /// states (`x_i = 0` iff `phi_i(0) > phi_i(1)`). Otherwise all strings are
    /// scanned in increasing raw-bit order and the first strict maximum wins.
    pub fn global_maximum(&self) -> Result<(BitString, f64)> {
        if let Some(m) = self.max_cache.get() {
            return Ok(*m);
        }
        let m = if self.k == 0 {
            self.separable_maximum()
        } else {
            self.scan_maximum()?
        };
        Ok(*self.max_cache.get_or_init(|| m))
    }

    fn separable_maximum(&self) -> (BitString, f64) {
        let mut bits = 0u32;
        for (i, row) in self.components().enumerate() {
            if row[0] <= row[1] {
                bits |= 1 << i;
            }
        }
        (BitString::from_raw(bits, self.n), self.fitness_raw(bits))
    }

    /// Exhaustive scan, ignoring the `K = 0` shortcut.
    pub fn scan_maximum(&self) -> Result<(BitString, f64)> {
        if self.n > MAX_N {
            return Err(Error::Capability(format!(
                "exhaustive scan of 2^{} strings",
                self.n
            )));
        }
        let mut best = (0u32, f64::NEG_INFINITY);
        let mut consider = |x: u32, f: f64| {
            if f > best.1 {
                best = (x, f);
            }
        };
        match self.fitness_table() {
            Ok(table) => table
                .iter()
                .enumerate()
                .for_each(|(x, &f)| consider(x as u32, f)),
            Err(_) => (0..1u32 << self.n).for_each(|x| consider(x, self.fitness_raw(x))),
        }
        Ok((BitString::from_raw(best.0, self.n), best.1))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&LandscapeDoc::from(self))?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: LandscapeDoc = serde_json::from_str(s)?;
        Landscape::from_tables(doc.k, doc.seed, doc.tables)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&s).map_err(|e| Error::Format {
            path: path.into(),
            message: e.to_string(),
        })
    }
}

/// JSON document form. Reals are written in shortest round-trip form, so a
/// reload reproduces every table entry bit-for-bit.
#[derive(Serialize, Deserialize)]
struct LandscapeDoc {
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "K")]
    k: usize,
    seed: u64,
    tables: Vec<Vec<f64>>,
}

impl From<&Landscape> for LandscapeDoc {
    fn from(l: &Landscape) -> Self {
        Self {
            n: l.n,
            k: l.k,
            seed: l.seed,
            tables: l.components().map(<[f64]>::to_vec).collect(),
        }
    }
}

/// Exhaustive statistics of a landscape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandscapeStats {
    /// Strings fitter than all `N` one-flip neighbours, global maximum included.
    pub maxima_count: u64,
    pub global_max: BitString,
    pub global_fitness: f64,
    /// Mean fitness of the maxima other than the global one, relative to the
    /// global fitness. `None` when the global maximum is the only maximum.
    pub mean_relative_local_max_fitness: Option<f64>,
    /// Mean fitness of all `2^N` strings relative to the global fitness.
    pub mean_relative_fitness_all: f64,
}

/// Counts the maxima and computes the relative-fitness statistics.
pub fn enumerate_maxima(landscape: &Landscape) -> Result<LandscapeStats> {
    let n = landscape.n();
    let table = landscape.fitness_table()?;
    let mut count = 0u64;
    let mut local_sum = 0.0;
    let mut best = (0u32, f64::NEG_INFINITY);
    for (x, &f) in table.iter().enumerate() {
        if f > best.1 {
            best = (x as u32, f);
        }
        if (0..n).all(|b| f > table[x ^ (1 << b)]) {
            count += 1;
            local_sum += f;
        }
    }
    let (global_bits, global_fitness) = best;
    let total: f64 = table.iter().sum();
    let local = count - 1;
    Ok(LandscapeStats {
        maxima_count: count,
        global_max: BitString::from_raw(global_bits, n),
        global_fitness,
        mean_relative_local_max_fitness: (local > 0)
            .then(|| (local_sum - global_fitness) / local as f64 / global_fitness),
        mean_relative_fitness_all: total / table.len() as f64 / global_fitness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant(n: usize, k: usize, c: f64) -> Landscape {
        Landscape::from_tables(k, 0, vec![vec![c; 1 << (k + 1)]; n]).unwrap()
    }

    /// Direct evaluation: explicit neighbourhood extraction, one bit at a time.
    fn oracle_fitness(l: &Landscape, x: &[u8]) -> f64 {
        let n = l.n();
        let mut total = 0.0;
        for i in 0..n {
            let mut pattern = 0usize;
            for j in 0..=l.k() {
                pattern += (x[(i + j) % n] as usize) * (1 << j);
            }
            total += l.component(i)[pattern];
        }
        total / n as f64
    }

    fn bits_of(x: u32, n: usize) -> Vec<u8> {
        (0..n).map(|i| (x >> i & 1) as u8).collect()
    }

    #[test]
    fn table_shapes() {
        let l = generate_landscape(16, 5, 3).unwrap();
        assert_eq!(l.components().count(), 16);
        assert!(l.components().all(|r| r.len() == 64));
        assert!(l.components().flatten().all(|v| (0.0..1.0).contains(v)));

        let l = generate_landscape(16, 0, 3).unwrap();
        assert!(l.components().all(|r| r.len() == 2));
    }

    #[test]
    fn generation_is_deterministic() {
        let a = generate_landscape(4, 1, 11).unwrap();
        let b = generate_landscape(4, 1, 11).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, generate_landscape(4, 1, 12).unwrap());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(
            generate_landscape(0, 0, 1),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            generate_landscape(31, 0, 1),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            generate_landscape(8, 8, 1),
            Err(Error::Parameter(_))
        ));
        let l = generate_landscape(8, 2, 1).unwrap();
        assert!(matches!(
            l.fitness(BitString::zeros(7).unwrap()),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn constant_tables_give_constant_fitness() {
        let l = constant(6, 2, 0.375);
        for x in 0..64 {
            assert_eq!(l.fitness_raw(x), 0.375);
        }
        // every string ties; the scan keeps the first one
        assert_eq!(l.scan_maximum().unwrap().0.bits(), 0);
    }

    #[test]
    fn fitness_matches_direct_summation() {
        let l = generate_landscape(4, 1, 2024).unwrap();
        for x in 0..16u32 {
            let expected = oracle_fitness(&l, &bits_of(x, 4));
            assert_eq!(l.fitness_raw(x), expected, "x = {x:04b}");
        }
        let l = generate_landscape(16, 5, 9).unwrap();
        for x in [0u32, 1, 0xffff, 0xa5a5, 0x1234] {
            assert_eq!(l.fitness_raw(x), oracle_fitness(&l, &bits_of(x, 16)));
        }
    }

    #[test]
    fn separable_maximum_value() {
        for seed in 0..20 {
            let l = generate_landscape(16, 0, seed).unwrap();
            let (x, f) = l.global_maximum().unwrap();
            let expected: f64 = l.components().map(|r| r[0].max(r[1])).sum::<f64>() / 16.0;
            assert!((f - expected).abs() < 1e-15);
            for (i, r) in l.components().enumerate() {
                assert_eq!(x.get(i), !(r[0] > r[1]));
            }
            assert_eq!(l.scan_maximum().unwrap(), (x, f));
        }
    }

    #[test]
    fn global_maximum_matches_enumeration() {
        let l = generate_landscape(12, 3, 77).unwrap();
        let mut best = (0, f64::NEG_INFINITY);
        for x in 0..4096u32 {
            let f = oracle_fitness(&l, &bits_of(x, 12));
            if f > best.1 {
                best = (x, f);
            }
        }
        let (x, f) = l.global_maximum().unwrap();
        assert_eq!(x.bits(), best.0);
        assert!((f - best.1).abs() < 1e-15);
    }

    #[test]
    fn maxima_count_matches_double_loop() {
        let l = generate_landscape(10, 2, 5).unwrap();
        let f: Vec<f64> = (0..1024u32)
            .map(|x| oracle_fitness(&l, &bits_of(x, 10)))
            .collect();
        let mut count = 0;
        for x in 0..1024usize {
            let mut is_max = true;
            for b in 0..10 {
                if f[x ^ (1 << b)] >= f[x] {
                    is_max = false;
                }
            }
            if is_max {
                count += 1;
            }
        }
        let stats = enumerate_maxima(&l).unwrap();
        assert_eq!(stats.maxima_count, count);
        assert!(stats.mean_relative_fitness_all > 0.0 && stats.mean_relative_fitness_all <= 1.0);
        if let Some(r) = stats.mean_relative_local_max_fitness {
            assert!(r > 0.0 && r < 1.0);
        }
    }

    #[test]
    fn smooth_landscape_has_single_maximum() {
        let l = generate_landscape(12, 0, 8).unwrap();
        let s = enumerate_maxima(&l).unwrap();
        assert_eq!(s.maxima_count, 1);
        assert_eq!(s.mean_relative_local_max_fitness, None);
        assert_eq!(s.global_max, l.global_maximum().unwrap().0);
    }

    #[test]
    fn global_maximum_is_unique() {
        for seed in 0..5 {
            let l = generate_landscape(16, 5, seed).unwrap();
            let table = l.fitness_table().unwrap();
            let (_, g) = l.global_maximum().unwrap();
            assert_eq!(table.iter().filter(|&&f| f == g).count(), 1);
        }
    }

    #[test]
    fn json_round_trip_is_exact() {
        let l = generate_landscape(8, 3, 31).unwrap();
        let back = Landscape::from_json(&l.to_json().unwrap()).unwrap();
        assert_eq!(l, back);
        for x in 0..256 {
            assert_eq!(l.fitness_raw(x).to_bits(), back.fitness_raw(x).to_bits());
        }
    }

    #[test]
    fn bitstring_text_form() {
        let x: BitString = "1100".parse().unwrap();
        assert_eq!(x.bits(), 0b0011);
        assert_eq!(x.to_string(), "1100");
        assert!("10a".parse::<BitString>().is_err());
        assert!(BitString::new(0b100, 2).is_err());
    }
}

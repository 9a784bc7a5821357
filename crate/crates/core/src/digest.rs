//! The agreed function `h` from graphs to bit sequences.
//!
//! Hash mode is HMAC-SHA256 over [`canonical_bytes`] truncated to `width`
//! bits, so distinct graphs collide. Bijective mode XORs the canonical
//! encoding with a key-derived stream and then applies a key-derived bit
//! permutation; it is a bijection on encodings of the session's node count,
//! so distinct graphs never collide.

use std::fmt;

use hmac::{Hmac, KeyInit, Mac};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest as _, Sha256};

use crate::error::{Error, Result};
use crate::graph::{apply_perm, canonical_bit_len, canonical_bytes, Graph, Permutation};
use crate::quantum::{Basis, GateWord};

type HmacSha256 = Hmac<Sha256>;

pub const MAX_HASH_WIDTH: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DigestMode {
    Hash,
    Bijective,
}

impl DigestMode {
    pub fn as_str(self) -> &'static str {
        match self {
            DigestMode::Hash => "hash",
            DigestMode::Bijective => "bijective",
        }
    }
}

impl std::str::FromStr for DigestMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hash" => Ok(DigestMode::Hash),
            "bijective" | "permutation" => Ok(DigestMode::Bijective),
            other => Err(Error::DigestParams(format!("unknown mode {other:?}"))),
        }
    }
}

/// Ordered bit sequence produced by the digest.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitSeq(Vec<bool>);

impl BitSeq {
    pub fn new(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn parity(&self) -> bool {
        parity(self.0.iter().copied())
    }

    pub fn xor(&self, other: &BitSeq) -> Result<BitSeq> {
        if self.len() != other.len() {
            return Err(Error::SizeMismatch { expected: self.len(), actual: other.len() });
        }
        Ok(BitSeq(self.0.iter().zip(&other.0).map(|(a, b)| a ^ b).collect()))
    }

    /// Bit `i` selects the basis for the `i`-th pair: 0 rectilinear, 1 diagonal.
    pub fn bases(&self) -> impl Iterator<Item = Basis> + '_ {
        self.0.iter().map(|&b| Basis::from_bit(b))
    }

    pub fn to_gate_word(&self) -> Result<GateWord> {
        GateWord::new(self.0.clone())
    }
}

impl fmt::Display for BitSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl Serialize for BitSeq {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// XOR of all bits.
pub fn parity(bits: impl IntoIterator<Item = bool>) -> bool {
    bits.into_iter().fold(false, |acc, b| acc ^ b)
}

#[derive(Clone)]
enum Engine {
    Hash(HmacSha256),
    Bijective { nodes: usize, stream: Vec<u8>, bit_perm: Vec<usize> },
}

/// Parameters of `h`. Construct with [`DigestParams::hash`] or
/// [`DigestParams::bijective`]; both validate their invariants.
#[derive(Clone)]
pub struct DigestParams {
    width: usize,
    mode: DigestMode,
    key: Vec<u8>,
    engine: Engine,
}

impl fmt::Debug for DigestParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DigestParams")
            .field("width", &self.width)
            .field("mode", &self.mode)
            .field("key", &hex::encode(&self.key))
            .finish()
    }
}

/// What the session header records about the digest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DigestHeader {
    pub mode: DigestMode,
    pub width: usize,
    pub key: String,
    pub primitive: String,
}

fn derive(key: &[u8], label: &[u8], counter: u64) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update((key.len() as u64).to_be_bytes());
    h.update(key);
    h.update(label);
    h.update(counter.to_be_bytes());
    h.finalize().into()
}

impl DigestParams {
    pub fn hash(width: usize, key: &[u8]) -> Result<Self> {
        if !(1..=MAX_HASH_WIDTH).contains(&width) {
            return Err(Error::DigestParams(format!("hash width {width} outside 1..={MAX_HASH_WIDTH}")));
        }
        let mac = HmacSha256::new_from_slice(key).map_err(|e| Error::DigestParams(e.to_string()))?;
        Ok(Self { width, mode: DigestMode::Hash, key: key.to_vec(), engine: Engine::Hash(mac) })
    }

    /// Bijective digest for `nodes`-node graphs; its width is the bit length
    /// of the canonical encoding.
    pub fn bijective(nodes: usize, key: &[u8]) -> Result<Self> {
        let width = canonical_bit_len(nodes);
        let len = width / 8;
        let stream: Vec<u8> = (0u64..)
            .flat_map(|c| derive(key, b"bijective-stream", c))
            .take(len)
            .collect();
        let mut bit_perm: Vec<usize> = (0..width).collect();
        let mut rng = ChaCha8Rng::from_seed(derive(key, b"bijective-perm", width as u64));
        bit_perm.shuffle(&mut rng);
        Ok(Self {
            width,
            mode: DigestMode::Bijective,
            key: key.to_vec(),
            engine: Engine::Bijective { nodes, stream, bit_perm },
        })
    }

    /// Builds params for `mode`. In bijective mode `width`, when given, must
    /// equal the canonical bit length for `nodes`.
    pub fn for_mode(mode: DigestMode, width: Option<usize>, nodes: usize, key: &[u8]) -> Result<Self> {
        match mode {
            DigestMode::Hash => Self::hash(width.unwrap_or(8), key),
            DigestMode::Bijective => {
                let p = Self::bijective(nodes, key)?;
                match width {
                    Some(w) if w != p.width => Err(Error::DigestParams(format!(
                        "bijective width for {nodes} nodes is {}, got {w}",
                        p.width
                    ))),
                    _ => Ok(p),
                }
            }
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn mode(&self) -> DigestMode {
        self.mode
    }

    pub fn key(&self) -> &[u8] {
        &self.key
    }

    pub fn header(&self) -> DigestHeader {
        let primitive = match self.mode {
            DigestMode::Hash => "hmac-sha256-truncated",
            DigestMode::Bijective => "sha256-keystream-xor+bit-permutation",
        };
        DigestHeader { mode: self.mode, width: self.width, key: hex::encode(&self.key), primitive: primitive.into() }
    }

    /// `h(g)`.
    pub fn digest(&self, g: &Graph) -> Result<BitSeq> {
        let bytes = canonical_bytes(g);
        match &self.engine {
            Engine::Hash(mac) => {
                let mut mac = mac.clone();
                mac.update(&bytes);
                let tag = mac.finalize().into_bytes();
                Ok(BitSeq((0..self.width).map(|i| tag[i / 8] & (0x80 >> (i % 8)) != 0).collect()))
            }
            Engine::Bijective { nodes, stream, bit_perm } => {
                if g.n() != *nodes {
                    return Err(Error::DigestParams(format!(
                        "bijective digest built for {nodes} nodes, graph has {}",
                        g.n()
                    )));
                }
                let masked: Vec<bool> = (0..self.width)
                    .map(|i| (bytes[i / 8] ^ stream[i / 8]) & (0x80 >> (i % 8)) != 0)
                    .collect();
                Ok(BitSeq(bit_perm.iter().map(|&src| masked[src]).collect()))
            }
        }
    }
}

/// Result of a brute-force isomorph search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsomorphSearch {
    pub found: Option<(Permutation, Graph)>,
    /// Digest evaluations spent.
    pub tries: usize,
}

/// Samples random relabelings `ξ` of `base` until `h(ξ(base)) = target`, at
/// most `max_tries` times. Brute-force stand-in for a quantum collision
/// search.
pub fn find_isomorph_with_digest<R: Rng + ?Sized>(
    params: &DigestParams,
    base: &Graph,
    target: &BitSeq,
    rng: &mut R,
    max_tries: usize,
) -> Result<IsomorphSearch> {
    search(params, base, target, None, rng, max_tries)
}

/// A genuine collision for `original`: an isomorph `H'` of `base` with
/// `h(H') = h(original)` and `H' ≠ original`. Bijective digests have none,
/// so the search returns not-found without spending any tries.
pub fn find_collision<R: Rng + ?Sized>(
    params: &DigestParams,
    base: &Graph,
    original: &Graph,
    rng: &mut R,
    max_tries: usize,
) -> Result<IsomorphSearch> {
    if params.mode() == DigestMode::Bijective {
        return Ok(IsomorphSearch { found: None, tries: 0 });
    }
    let target = params.digest(original)?;
    search(params, base, &target, Some(original), rng, max_tries)
}

fn search<R: Rng + ?Sized>(
    params: &DigestParams,
    base: &Graph,
    target: &BitSeq,
    exclude: Option<&Graph>,
    rng: &mut R,
    max_tries: usize,
) -> Result<IsomorphSearch> {
    if max_tries == 0 {
        return Err(Error::Config("max_tries must be at least 1".into()));
    }
    if target.len() != params.width() {
        return Err(Error::SizeMismatch { expected: params.width(), actual: target.len() });
    }
    for tries in 1..=max_tries {
        let xi = Permutation::random(base.n(), rng)?;
        let h = apply_perm(&xi, base)?;
        if &params.digest(&h)? == target && exclude != Some(&h) {
            return Ok(IsomorphSearch { found: Some((xi, h)), tries });
        }
    }
    Ok(IsomorphSearch { found: None, tries: max_tries })
}

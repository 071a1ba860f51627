//! Huffman codes and conditional descriptors: a variable γ that, together
//! with β, determines α.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};
use std::fmt;
use std::str::FromStr;

use crate::dist::{DistBuilder, JointDistribution, VarSet};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct BitString(pub Vec<bool>);

impl BitString {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_prefix_of(&self, other: &BitString) -> bool {
        other.0.starts_with(&self.0)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::Format(format!("`{c}` is not a bit"))),
            })
            .collect::<Result<Vec<bool>>>()
            .map(BitString)
    }
}

/// Doubles every bit and appends `01`; the images of any set of words form a
/// prefix-free set.
pub fn prefix_free_expand(word: &BitString) -> BitString {
    let mut out = Vec::with_capacity(2 * word.len() + 2);
    for &b in &word.0 {
        out.push(b);
        out.push(b);
    }
    out.push(false);
    out.push(true);
    BitString(out)
}

/// Huffman code for `weights`, one codeword per symbol in input order.
///
/// Nodes are queued by `(weight, insertion index)`; leaves are inserted first
/// in input order, merged nodes after them. The first node popped becomes the
/// `0` child. A lone symbol gets the empty word.
pub fn huffman_code(weights: &[u128]) -> Vec<BitString> {
    let n = weights.len();
    if n <= 1 {
        return vec![BitString::default(); n];
    }
    // children[i - n] for internal node i
    let mut children: Vec<(usize, usize)> = Vec::with_capacity(n - 1);
    let mut heap: BinaryHeap<Reverse<(u128, usize)>> = weights
        .iter()
        .enumerate()
        .map(|(i, &w)| Reverse((w, i)))
        .collect();
    while heap.len() > 1 {
        let Reverse((w0, a)) = heap.pop().expect("two nodes");
        let Reverse((w1, b)) = heap.pop().expect("two nodes");
        children.push((a, b));
        heap.push(Reverse((w0 + w1, n + children.len() - 1)));
    }
    let Reverse((_, root)) = heap.pop().expect("root");
    let mut codes = vec![BitString::default(); n];
    let mut stack = vec![(root, Vec::new())];
    while let Some((node, prefix)) = stack.pop() {
        if node < n {
            codes[node] = BitString(prefix);
            continue;
        }
        let (zero, one) = children[node - n];
        let mut p0 = prefix.clone();
        p0.push(false);
        let mut p1 = prefix;
        p1.push(true);
        stack.push((one, p1));
        stack.push((zero, p0));
    }
    codes
}

/// Per-β Huffman codes of α, with γ the rank of the expanded codeword among
/// all distinct expanded codewords.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionalDescriptor {
    alpha: VarSet,
    beta: VarSet,
    codebook: BTreeMap<Vec<i64>, BTreeMap<Vec<i64>, BitString>>,
    gamma_words: Vec<BitString>,
}

fn project(row: &[i64], cols: &[usize]) -> Vec<i64> {
    cols.iter().map(|&c| row[c]).collect()
}

impl ConditionalDescriptor {
    pub fn new(d: &JointDistribution, alpha: VarSet, beta: VarSet) -> Result<Self> {
        d.entropy(alpha.union(beta))?;
        let (ac, bc) = (alpha.indices(), beta.indices());
        let mut joint: BTreeMap<Vec<i64>, BTreeMap<Vec<i64>, u128>> = BTreeMap::new();
        for (row, w) in d.atoms() {
            *joint
                .entry(project(row, &bc))
                .or_default()
                .entry(project(row, &ac))
                .or_insert(0) += w;
        }
        let mut codebook = BTreeMap::new();
        let mut words = Vec::new();
        for (b, alphas) in joint {
            let weights: Vec<u128> = alphas.values().copied().collect();
            let codes = huffman_code(&weights);
            words.extend(codes.iter().map(prefix_free_expand));
            codebook.insert(b, alphas.into_keys().zip(codes).collect());
        }
        words.sort();
        words.dedup();
        Ok(ConditionalDescriptor {
            alpha,
            beta,
            codebook,
            gamma_words: words,
        })
    }

    pub fn alpha(&self) -> VarSet {
        self.alpha
    }

    pub fn beta(&self) -> VarSet {
        self.beta
    }

    /// β value → (α value → raw codeword).
    pub fn codebook(&self) -> &BTreeMap<Vec<i64>, BTreeMap<Vec<i64>, BitString>> {
        &self.codebook
    }

    /// Distinct expanded codewords; γ = i denotes `gamma_words()[i]`.
    pub fn gamma_words(&self) -> &[BitString] {
        &self.gamma_words
    }

    pub fn codeword(&self, alpha: &[i64], beta: &[i64]) -> Option<&BitString> {
        self.codebook.get(beta)?.get(alpha)
    }

    /// Value of γ on a row of the distribution the descriptor was built from.
    pub fn gamma_of_row(&self, row: &[i64]) -> Option<i64> {
        let word = self.codeword(
            &project(row, &self.alpha.indices()),
            &project(row, &self.beta.indices()),
        )?;
        let expanded = prefix_free_expand(word);
        self.gamma_words
            .binary_search(&expanded)
            .ok()
            .map(|i| i as i64)
    }

    /// γ value for every atom of `d`, in atom order.
    pub fn gamma_column(&self, d: &JointDistribution) -> Result<Vec<i64>> {
        d.atoms()
            .map(|(row, _)| {
                self.gamma_of_row(row).ok_or_else(|| {
                    Error::InvalidParameter("row outside the descriptor's codebook".into())
                })
            })
            .collect()
    }

    /// `d` with γ appended as a new variable.
    pub fn attach(&self, d: &JointDistribution, name: &str) -> Result<JointDistribution> {
        let gamma = self.gamma_column(d)?;
        let mut names: Vec<String> = d.names().to_vec();
        names.push(name.to_string());
        let mut b = DistBuilder::with_capacity(&names, d.len());
        let mut buf = Vec::with_capacity(names.len());
        for ((row, w), g) in d.atoms().zip(gamma) {
            buf.clear();
            buf.extend_from_slice(row);
            buf.push(g);
            b.push(&buf, w);
        }
        b.build_with_total(d.total())
    }

    /// H(γ) in bits under `d`.
    pub fn gamma_entropy(&self, d: &JointDistribution) -> Result<f64> {
        let with = self.attach(d, "\u{1}gamma")?;
        with.entropy(VarSet::single(with.arity() - 1))
    }
}

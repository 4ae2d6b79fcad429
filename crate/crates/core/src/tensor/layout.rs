use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result};

/// Physical role of a subsystem; it fixes the basis-label vocabulary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SubsystemKind {
    /// Cavity mode, basis `|0⟩, |1⟩, …` up to the Fock cutoff.
    Cavity,
    /// Type-1 atom internal levels `|b⟩` (ground), `|a⟩` (excited).
    Internal,
    /// Quantized transverse momentum `|P₀⟩, |P₋₂⟩, …`.
    Momentum,
    /// Auxiliary atom internal levels `|g⟩`, `|e⟩`.
    Auxiliary,
}

impl SubsystemKind {
    pub fn name(self) -> &'static str {
        match self {
            SubsystemKind::Cavity => "cavity",
            SubsystemKind::Internal => "internal",
            SubsystemKind::Momentum => "momentum",
            SubsystemKind::Auxiliary => "auxiliary",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "cavity" => SubsystemKind::Cavity,
            "internal" => SubsystemKind::Internal,
            "momentum" => SubsystemKind::Momentum,
            "auxiliary" => SubsystemKind::Auxiliary,
            _ => return None,
        })
    }

    /// Ket label of basis state `index`, e.g. `b`, `P₋₂`, `1`.
    pub fn basis_label(self, index: usize, ascii: bool) -> String {
        match (self, index) {
            (SubsystemKind::Cavity, n) => n.to_string(),
            (SubsystemKind::Internal, 0) => "b".into(),
            (SubsystemKind::Internal, 1) => "a".into(),
            (SubsystemKind::Auxiliary, 0) => "g".into(),
            (SubsystemKind::Auxiliary, 1) => "e".into(),
            (SubsystemKind::Momentum, k) => {
                if ascii {
                    if k == 0 {
                        "P0".into()
                    } else {
                        format!("P-{}", 2 * k)
                    }
                } else {
                    let mut s = String::from("P");
                    if k > 0 {
                        s.push('₋');
                    }
                    for c in (2 * k).to_string().chars() {
                        let d = c.to_digit(10).unwrap_or(0) as usize;
                        s.push(['₀', '₁', '₂', '₃', '₄', '₅', '₆', '₇', '₈', '₉'][d]);
                    }
                    s
                }
            }
            (_, n) => n.to_string(),
        }
    }

    /// Inverse of [`basis_label`](Self::basis_label), accepting both the
    /// ASCII and Unicode spellings as well as bare indices.
    pub fn parse_basis(self, text: &str) -> Option<usize> {
        let named = match (self, text) {
            (SubsystemKind::Internal, "b") => Some(0),
            (SubsystemKind::Internal, "a") => Some(1),
            (SubsystemKind::Auxiliary, "g") => Some(0),
            (SubsystemKind::Auxiliary, "e") => Some(1),
            (SubsystemKind::Momentum, "P0" | "Po" | "P₀") => Some(0),
            (SubsystemKind::Momentum, "P-2" | "P₋₂") => Some(1),
            (SubsystemKind::Momentum, t) if t.starts_with("P-") => {
                t[2..].parse::<usize>().ok().filter(|k| k % 2 == 0).map(|k| k / 2)
            }
            (SubsystemKind::Momentum, t) if t.starts_with("P₋") => {
                let mut k = 0usize;
                for c in t["P₋".len()..].chars() {
                    let d = ('₀'..='₉').position(|s| s == c)?;
                    k = k * 10 + d;
                }
                k.is_multiple_of(2).then_some(k / 2)
            }
            _ => None,
        };
        named.or_else(|| text.parse().ok())
    }
}

impl fmt::Display for SubsystemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subsystem {
    pub label: String,
    pub kind: SubsystemKind,
    pub dim: usize,
}

impl Subsystem {
    pub fn new(label: impl Into<String>, kind: SubsystemKind, dim: usize) -> Self {
        Subsystem { label: label.into(), kind, dim }
    }
}

/// Subsystem labels of a type-1 atom: `(internal, momentum)`.
pub fn atom_labels(atom: &str) -> (String, String) {
    (format!("{atom}.int"), format!("{atom}.mom"))
}

/// Ordered, uniquely labelled list of subsystems.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsystemLayout {
    subsystems: Vec<Subsystem>,
}

impl SubsystemLayout {
    pub fn new(subsystems: Vec<Subsystem>) -> Result<Self> {
        for (i, s) in subsystems.iter().enumerate() {
            if s.dim < 2 {
                return Err(Error::InvalidDimension { label: s.label.clone(), dim: s.dim });
            }
            if subsystems[..i].iter().any(|o| o.label == s.label) {
                return Err(Error::DuplicateLabel(s.label.clone()));
            }
        }
        Ok(SubsystemLayout { subsystems })
    }

    pub fn builder() -> LayoutBuilder {
        LayoutBuilder::default()
    }

    pub fn subsystems(&self) -> &[Subsystem] {
        &self.subsystems
    }

    pub fn len(&self) -> usize {
        self.subsystems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsystems.is_empty()
    }

    pub fn total_dim(&self) -> usize {
        self.subsystems.iter().map(|s| s.dim).product()
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.subsystems.iter().map(|s| s.label.as_str())
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.subsystems
            .iter()
            .position(|s| s.label == label)
            .ok_or_else(|| Error::UnknownLabel(label.into()))
    }

    pub fn get(&self, label: &str) -> Result<&Subsystem> {
        self.position(label).map(|p| &self.subsystems[p])
    }

    pub fn dims(&self) -> Vec<usize> {
        self.subsystems.iter().map(|s| s.dim).collect()
    }

    /// Row-major strides: the stride of the last subsystem is 1.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = alloc::vec![1; self.len()];
        for k in (0..self.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.subsystems[k + 1].dim;
        }
        strides
    }

    /// Per-subsystem basis indices of flat index `index`.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = alloc::vec![0; self.len()];
        for k in (0..self.len()).rev() {
            let d = self.subsystems[k].dim;
            out[k] = index % d;
            index /= d;
        }
        out
    }

    /// Flat index of a digit tuple.
    pub fn flat_index(&self, digits: &[usize]) -> usize {
        digits
            .iter()
            .zip(&self.subsystems)
            .fold(0, |acc, (&d, s)| acc * s.dim + d)
    }

    /// Layout with the subsystems at `positions` removed.
    pub fn without(&self, positions: &[usize]) -> SubsystemLayout {
        SubsystemLayout {
            subsystems: self
                .subsystems
                .iter()
                .enumerate()
                .filter(|(i, _)| !positions.contains(i))
                .map(|(_, s)| s.clone())
                .collect(),
        }
    }

    /// Layout restricted to `positions`, kept in layout order.
    pub fn only(&self, positions: &[usize]) -> SubsystemLayout {
        SubsystemLayout {
            subsystems: self
                .subsystems
                .iter()
                .enumerate()
                .filter(|(i, _)| positions.contains(i))
                .map(|(_, s)| s.clone())
                .collect(),
        }
    }

    /// Concatenation; labels must stay unique.
    pub fn concat(&self, other: &SubsystemLayout) -> Result<SubsystemLayout> {
        let mut subsystems = self.subsystems.clone();
        subsystems.extend(other.subsystems.iter().cloned());
        SubsystemLayout::new(subsystems)
    }

    /// Comma-separated ket label of a flat index, e.g. `0,b,P₀`.
    pub fn ket_label(&self, index: usize, ascii: bool) -> String {
        let digits = self.digits(index);
        let parts: Vec<String> = self
            .subsystems
            .iter()
            .zip(digits)
            .map(|(s, d)| s.kind.basis_label(d, ascii))
            .collect();
        parts.join(",")
    }

    pub(crate) fn positions_of(&self, labels: &[&str]) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(labels.len());
        for l in labels {
            let p = self.position(l)?;
            if out.contains(&p) {
                return Err(Error::DuplicateLabel((*l).into()));
            }
            out.push(p);
        }
        Ok(out)
    }
}

/// Incremental layout construction; `atom` adds an internal and a momentum
/// subsystem labelled `<name>.int` and `<name>.mom`.
#[derive(Debug, Default)]
pub struct LayoutBuilder {
    subsystems: Vec<Subsystem>,
}

impl LayoutBuilder {
    pub fn cavity(mut self, label: &str, fock: usize) -> Self {
        self.subsystems.push(Subsystem::new(label, SubsystemKind::Cavity, fock));
        self
    }

    pub fn atom(mut self, name: &str) -> Self {
        let (int, mom) = atom_labels(name);
        self.subsystems.push(Subsystem::new(int, SubsystemKind::Internal, 2));
        self.subsystems.push(Subsystem::new(mom, SubsystemKind::Momentum, 2));
        self
    }

    pub fn aux(mut self, label: &str) -> Self {
        self.subsystems.push(Subsystem::new(label, SubsystemKind::Auxiliary, 2));
        self
    }

    pub fn subsystem(mut self, label: &str, kind: SubsystemKind, dim: usize) -> Self {
        self.subsystems.push(Subsystem::new(label, kind, dim));
        self
    }

    pub fn build(self) -> Result<SubsystemLayout> {
        SubsystemLayout::new(self.subsystems)
    }
}

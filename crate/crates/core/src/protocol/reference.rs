//! Closed-form target states, transcribed with their printed signs.
//!
//! Every reference is built over a layout assembled from the atom and cavity
//! labels it is given: cavities first, then each atom's `.int` and `.mom`
//! subsystems, matching the order a protocol leaves behind once auxiliary
//! atoms are detected and spent cavities removed.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

use crate::math::{cis, real, I, ONE, ZERO};
use crate::tensor::{atom_labels, Subsystem, SubsystemKind, SubsystemLayout};
use crate::{Error, Result, StateVector, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReferenceFamily {
    /// `(|0,b,P₀⟩ + |1,b,P₋₂⟩)/√2`: one cavity, one atom.
    BraggSplit,
    /// `(|0,b,P₀⟩ − i|1,a,P₋₂⟩)/√2`: one cavity, one atom.
    TaggedAtom,
    /// `(|0⟩|b,P₀⟩^⊗n + c_n|1⟩|a,P₋₂⟩^⊗n)/√2`: one cavity, `n` atoms.
    TaggedChain,
    /// Four detection blocks over two atoms; needs the outcome.
    LinearCluster,
    /// `(|0,bb,P₀P₀⟩ + |1,aa,P₋₂P₋₂⟩)/√2`: one cavity, two atoms.
    GhzPair1,
    /// Same form as [`ReferenceFamily::GhzPair1`] for the second cavity.
    GhzPair2,
    /// Four detection blocks over four atoms at dispersive angle `λt_d`;
    /// needs the outcome.
    Cluster2d,
    /// The `(+,+,+,−)` four-atom state.
    Cluster2dStandard,
    /// `∏ⱼ (|b,P₀⟩ + |a,P₋₂⟩)/√2` over the given atoms.
    RingGraph,
}

pub const ALL_FAMILIES: [ReferenceFamily; 9] = [
    ReferenceFamily::BraggSplit,
    ReferenceFamily::TaggedAtom,
    ReferenceFamily::TaggedChain,
    ReferenceFamily::LinearCluster,
    ReferenceFamily::GhzPair1,
    ReferenceFamily::GhzPair2,
    ReferenceFamily::Cluster2d,
    ReferenceFamily::Cluster2dStandard,
    ReferenceFamily::RingGraph,
];

impl ReferenceFamily {
    pub fn name(self) -> &'static str {
        match self {
            ReferenceFamily::BraggSplit => "bragg-split",
            ReferenceFamily::TaggedAtom => "tagged-atom",
            ReferenceFamily::TaggedChain => "tagged-chain",
            ReferenceFamily::LinearCluster => "linear-cluster",
            ReferenceFamily::GhzPair1 => "ghz-pair-1",
            ReferenceFamily::GhzPair2 => "ghz-pair-2",
            ReferenceFamily::Cluster2d => "cluster-2d",
            ReferenceFamily::Cluster2dStandard => "cluster-2d-standard",
            ReferenceFamily::RingGraph => "ring-graph",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        ALL_FAMILIES
            .iter()
            .copied()
            .find(|f| f.name() == name)
            .ok_or_else(|| Error::UnknownReference(name.into()))
    }

    /// `true` when the reference depends on the detection outcome.
    pub fn needs_outcome(self) -> bool {
        matches!(self, ReferenceFamily::LinearCluster | ReferenceFamily::Cluster2d)
    }
}

/// Inputs for building a reference over a concrete layout.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ReferenceContext {
    pub cavities: Vec<String>,
    pub atoms: Vec<String>,
    /// Detection digits in detect order (`0 = g`).
    pub outcome: Option<Vec<usize>>,
    /// Dispersive angle `λ t_d` (cluster blocks only).
    pub lambda_t: f64,
}

impl ReferenceContext {
    pub fn atoms(atoms: &[&str]) -> Self {
        ReferenceContext { atoms: atoms.iter().map(|s| (*s).into()).collect(), ..Default::default() }
    }

    pub fn with_cavity(mut self, cavity: &str) -> Self {
        self.cavities.push(cavity.into());
        self
    }

    pub fn with_outcome(mut self, outcome: &[usize]) -> Self {
        self.outcome = Some(outcome.to_vec());
        self
    }

    pub fn with_lambda_t(mut self, lambda_t: f64) -> Self {
        self.lambda_t = lambda_t;
        self
    }
}

/// Excited-branch coefficient of the tagged chain: `∏ⱼ i^{3j}`, except for
/// two atoms where the printed pair carries `+1`.
pub fn chain_coefficient(n: usize) -> C64 {
    if n == 2 {
        return ONE;
    }
    i_pow(3 * n * (n + 1) / 2)
}

fn i_pow(k: usize) -> C64 {
    [ONE, I, -ONE, -I][k % 4]
}

fn layout_for(ctx: &ReferenceContext) -> Result<SubsystemLayout> {
    let mut subs = Vec::new();
    for c in &ctx.cavities {
        subs.push(Subsystem::new(c.clone(), SubsystemKind::Cavity, 2));
    }
    for a in &ctx.atoms {
        let (int, mom) = atom_labels(a);
        subs.push(Subsystem::new(int, SubsystemKind::Internal, 2));
        subs.push(Subsystem::new(mom, SubsystemKind::Momentum, 2));
    }
    SubsystemLayout::new(subs)
}

fn arity(name: &'static str, ctx: &ReferenceContext, cavities: usize, atoms: Option<usize>) -> Result<()> {
    if ctx.cavities.len() != cavities {
        let needs = if cavities == 0 { "no cavity" } else { "exactly one cavity" };
        return Err(Error::ReferenceArgument { name, needs });
    }
    match atoms {
        Some(n) if ctx.atoms.len() != n => Err(Error::ReferenceArgument {
            name,
            needs: match n {
                1 => "exactly one atom",
                2 => "exactly two atoms",
                _ => "exactly four atoms",
            },
        }),
        None if ctx.atoms.is_empty() => Err(Error::ReferenceArgument { name, needs: "at least one atom" }),
        _ => Ok(()),
    }
}

fn outcome(name: &'static str, ctx: &ReferenceContext) -> Result<(usize, usize)> {
    match ctx.outcome.as_deref() {
        Some([o1, o2]) if *o1 < 2 && *o2 < 2 => Ok((*o1, *o2)),
        _ => Err(Error::ReferenceArgument { name, needs: "a two-atom detection outcome" }),
    }
}

/// Sum over branches where every atom in a group is jointly `|b,P₀⟩` (bit 0)
/// or `|a,P₋₂⟩` (bit 1). `groups[k]` lists atom positions of group `k`;
/// `coef(bits)` gives the amplitude of pattern `bits` (group 0 most
/// significant). A leading cavity, if present, follows `cavity_bit`.
fn grouped_state(
    layout: SubsystemLayout,
    n_atoms: usize,
    groups: &[Vec<usize>],
    cavity_bit: Option<usize>,
    coef: impl Fn(usize) -> C64,
) -> Result<StateVector> {
    let mut amps = vec![ZERO; layout.total_dim()];
    let ncav = layout.len() - 2 * n_atoms;
    let g = groups.len();
    for bits in 0..(1usize << g) {
        let mut digits = vec![0usize; layout.len()];
        for (k, group) in groups.iter().enumerate() {
            let bit = (bits >> (g - 1 - k)) & 1;
            for &a in group {
                digits[ncav + 2 * a] = bit;
                digits[ncav + 2 * a + 1] = bit;
            }
            if cavity_bit == Some(k) {
                digits[0] = bit;
            }
        }
        amps[layout.flat_index(&digits)] += coef(bits);
    }
    StateVector::new(layout, amps)
}

/// Builds `family` over the layout implied by `ctx`.
pub fn reference_state(family: ReferenceFamily, ctx: &ReferenceContext) -> Result<StateVector> {
    let name = family.name();
    let layout = layout_for(ctx);
    match family {
        ReferenceFamily::BraggSplit | ReferenceFamily::TaggedAtom => {
            arity(name, ctx, 1, Some(1))?;
            let layout = layout?;
            let mut amps = vec![ZERO; 8];
            amps[0] = real(FRAC_1_SQRT_2);
            if family == ReferenceFamily::BraggSplit {
                amps[layout.flat_index(&[1, 0, 1])] = real(FRAC_1_SQRT_2);
            } else {
                amps[layout.flat_index(&[1, 1, 1])] = -I * FRAC_1_SQRT_2;
            }
            StateVector::new(layout, amps)
        }
        ReferenceFamily::TaggedChain | ReferenceFamily::GhzPair1 | ReferenceFamily::GhzPair2 => {
            let n = if family == ReferenceFamily::TaggedChain { None } else { Some(2) };
            arity(name, ctx, 1, n)?;
            let n = ctx.atoms.len();
            let c = chain_coefficient(n);
            let all: Vec<usize> = (0..n).collect();
            grouped_state(layout?, n, &[all], Some(0), |bits| if bits == 0 { ONE } else { c })
        }
        ReferenceFamily::LinearCluster => {
            arity(name, ctx, 0, Some(2))?;
            let (o1, o2) = outcome(name, ctx)?;
            grouped_state(layout?, 2, &[vec![0], vec![1]], None, |bits| {
                let (x1, x2) = (bits >> 1, bits & 1);
                if (o1 * x1 + o2 * x2) % 2 == 0 {
                    ONE
                } else {
                    -ONE
                }
            })
        }
        ReferenceFamily::Cluster2d => {
            arity(name, ctx, 0, Some(4))?;
            let (o1, o2) = outcome(name, ctx)?;
            let th = ctx.lambda_t;
            let base = [ONE, I * cis(-th), cis(-2.0 * th), -I * cis(th)];
            grouped_state(layout?, 4, &[vec![0, 1], vec![2, 3]], None, |bits| {
                let (x, y) = (bits >> 1, bits & 1);
                let sign = if (o1 * x + o2 * y) % 2 == 0 { ONE } else { -ONE };
                sign * base[bits]
            })
        }
        ReferenceFamily::Cluster2dStandard => {
            arity(name, ctx, 0, Some(4))?;
            grouped_state(layout?, 4, &[vec![0, 1], vec![2, 3]], None, |bits| if bits == 3 { -ONE } else { ONE })
        }
        ReferenceFamily::RingGraph => {
            arity(name, ctx, 0, None)?;
            let n = ctx.atoms.len();
            let groups: Vec<Vec<usize>> = (0..n).map(|a| vec![a]).collect();
            grouped_state(layout?, n, &groups, None, |_| ONE)
        }
    }
}

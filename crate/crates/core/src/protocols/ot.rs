//! One-out-of-two oblivious transfer with a single gbit.

use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{GptError, Result};
use crate::rational::{to_f64, Rational};

use super::{pure_gbit, ProtocolTranscript, Round, SharedBox};

pub const OT_AUDIT_SCOPE: &str =
    "canonical single-gbit measurements (a fiducial measurement followed by an \
     outcome relabelling); adaptive multi-round strategies with ancillas are not audited";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OtAudit {
    pub strategies_checked: usize,
    /// Largest mutual information with `(b0, b1)` under a uniform prior.
    pub max_leakage_bits: f64,
    /// Largest number of the two bits any strategy's output depends on.
    pub max_bits_revealed: usize,
    pub scope: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OtVerdict {
    pub bits: [u8; 2],
    pub choice: u8,
    pub bob_output: u8,
    pub correct: bool,
    /// Alice's view (inputs and the state she sends) does not depend on the
    /// choice, since Bob sends her nothing.
    pub alice_view_independent: bool,
    pub audit: OtAudit,
}

fn entropy(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.log2()).sum()
}

/// Audits every deterministic canonical measurement Bob can make on the
/// encoded gbit.
pub fn oblivious_transfer_audit() -> Result<OtAudit> {
    let mut checked = 0;
    let mut max_info: f64 = 0.0;
    let mut max_revealed = 0;
    for x in 0..2 {
        for f in [[0usize, 0], [0, 1], [1, 0], [1, 1]] {
            checked += 1;
            // Output distribution for each of the four inputs.
            let mut cond: Vec<[Rational; 2]> = vec![[Rational::zero(), Rational::zero()]; 4];
            for (i, row) in cond.iter_mut().enumerate() {
                let state = pure_gbit([i >> 1 & 1, i & 1]);
                for a in 0..2 {
                    row[f[a]] += state.entries[2 * x + a].clone();
                }
            }
            let marginal: Vec<f64> = (0..2)
                .map(|o| cond.iter().map(|r| to_f64(&r[o])).sum::<f64>() / 4.0)
                .collect();
            let conditional: f64 = cond
                .iter()
                .map(|r| entropy(&[to_f64(&r[0]), to_f64(&r[1])]) / 4.0)
                .sum();
            max_info = max_info.max(entropy(&marginal) - conditional);
            let depends_on = |bit: usize| (0..4).any(|i| cond[i] != cond[i ^ (1 << (1 - bit))]);
            max_revealed = max_revealed.max((0..2).filter(|&b| depends_on(b)).count());
        }
    }
    Ok(OtAudit {
        strategies_checked: checked,
        max_leakage_bits: max_info,
        max_bits_revealed: max_revealed,
        scope: OT_AUDIT_SCOPE.to_string(),
    })
}

/// Alice encodes `b0` and `b1` as the fiducial outcomes of one gbit; Bob
/// measures fiducial `choice`.
pub fn run_oblivious_transfer(
    bits: (u8, u8),
    choice: u8,
    seed: u64,
) -> Result<ProtocolTranscript<OtVerdict>> {
    if bits.0 > 1 || bits.1 > 1 || choice > 1 {
        return Err(GptError::Parse("bits and choice must be 0 or 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let encoded = [usize::from(bits.0), usize::from(bits.1)];
    let alice_view = |_: u8| (bits, pure_gbit(encoded));
    let state = pure_gbit(encoded);
    let mut rounds = vec![Round::new(
        "alice",
        "send gbit",
        2 * encoded[0] + encoded[1],
    )];
    let mut gbit = SharedBox::new(state)?;
    let out = gbit.measure(0, usize::from(choice), &mut rng)? as u8;
    rounds.push(Round::new(
        "bob",
        format!("measure x{}", choice + 1),
        usize::from(out),
    ));
    let expected = if choice == 0 { bits.0 } else { bits.1 };
    Ok(ProtocolTranscript {
        seed,
        rounds,
        verdict: OtVerdict {
            bits: [bits.0, bits.1],
            choice,
            bob_output: out,
            correct: out == expected,
            alice_view_independent: alice_view(0) == alice_view(1),
            audit: oblivious_transfer_audit()?,
        },
    })
}

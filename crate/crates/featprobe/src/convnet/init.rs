//! Seeded random weight initialization for untrained-feature experiments.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::convnet::arch::{ArchitectureSpec, Conv3Spec, ConvSpec};
use crate::tensorio::{Tensor, TensorBundle};

/// Initialization parameters. The scheme is uniform over
/// `(-1/sqrt(fanIn), 1/sqrt(fanIn))` for conv weights and biases, with
/// `fanIn = Cin * kh * kw`; batch-norm parameters are the identity
/// statistics (gamma 1, beta 0, mean 0, var 1).
#[derive(Debug, Clone, Copy)]
pub struct InitConfig {
    pub seed: u64,
}

fn fan_in_bound(spec: &ConvSpec) -> f32 {
    let fan_in = (spec.in_ch * spec.kernel.0 * spec.kernel.1) as f32;
    1.0 / fan_in.sqrt()
}

/// Draws a fresh weight bundle for `arch`; identical `(arch, seed)` pairs
/// produce bit-identical bundles.
pub fn init_weights(arch: &ArchitectureSpec, cfg: &InitConfig) -> TensorBundle {
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    let mut bundle = TensorBundle::new();

    // Bound per tensor name: conv tensors draw uniform, bn tensors are
    // constants. Draw order follows the weight layout.
    for (name, dims) in arch.weight_layout() {
        let numel: usize = dims.iter().product();
        let data: Vec<f32> = if let Some(bn_value) = bn_constant(&name) {
            vec![bn_value; numel]
        } else {
            let bound = bound_for(arch, &name);
            (0..numel).map(|_| rng.random_range(-bound..bound)).collect()
        };
        bundle
            .push(Tensor::new(name, dims, data).expect("layout dims are valid"))
            .expect("layout names are unique");
    }

    bundle.set_meta("arch", arch.id.to_string());
    bundle.set_meta("seed", cfg.seed.to_string());
    bundle.set_meta("trained", "false");
    bundle.set_meta("init", "uniform_fan_in");
    bundle
}

fn bn_constant(name: &str) -> Option<f32> {
    if !name.starts_with("bn") {
        return None;
    }
    Some(match name.rsplit('.').next().unwrap_or("") {
        "gamma" | "var" => 1.0,
        _ => 0.0,
    })
}

fn bound_for(arch: &ArchitectureSpec, name: &str) -> f32 {
    let conv3_main = || match &arch.conv3 {
        Conv3Spec::Regular(c) => *c,
        Conv3Spec::Deformable { conv, .. } => *conv,
    };
    let offset = || match &arch.conv3 {
        Conv3Spec::Deformable { offset, .. } => *offset,
        _ => unreachable!("offset tensors only exist on the deformable arch"),
    };
    let spec = match name {
        "conv1.w" | "conv1.b" => arch.conv1,
        "conv2.w" | "conv2.b" => arch.conv2,
        "conv3.w" | "conv3.b" => conv3_main(),
        "conv3.p.w" | "conv3.p.b" => offset(),
        other => panic!("no fan-in bound for tensor '{other}'"),
    };
    fan_in_bound(&spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convnet::arch::ArchId;

    #[test]
    fn same_seed_is_bit_identical() {
        let arch = ArchitectureSpec::new(ArchId::Regular);
        let a = init_weights(&arch, &InitConfig { seed: 42 });
        let b = init_weights(&arch, &InitConfig { seed: 42 });
        assert_eq!(a, b);
    }

    #[test]
    fn bundles_validate_against_their_architecture() {
        for id in ArchId::ALL {
            let arch = ArchitectureSpec::new(id);
            let bundle = init_weights(&arch, &InitConfig { seed: 0 });
            arch.validate_weights(&bundle).unwrap();
        }
    }

    #[test]
    fn regular_bundle_has_expected_names_and_dims() {
        let arch = ArchitectureSpec::new(ArchId::Regular);
        let bundle = init_weights(&arch, &InitConfig { seed: 1 });
        assert_eq!(bundle.get("conv1.w").unwrap().dims(), &[10, 1, 5, 5]);
        assert_eq!(bundle.get("conv1.b").unwrap().dims(), &[10]);
        assert_eq!(bundle.get("conv3.w").unwrap().dims(), &[30, 20, 5, 5]);
        assert_eq!(bundle.get("conv3.b").unwrap().dims(), &[30]);
        assert_eq!(bundle.len(), 18);
    }

    #[test]
    fn weights_respect_fan_in_bounds() {
        let arch = ArchitectureSpec::new(ArchId::Deformable);
        let bundle = init_weights(&arch, &InitConfig { seed: 5 });
        let checks = [
            ("conv1.w", 1.0 / (25.0f32).sqrt()),
            ("conv2.w", 1.0 / (250.0f32).sqrt()),
            ("conv3.w", 1.0 / (500.0f32).sqrt()),
            ("conv3.p.w", 1.0 / (180.0f32).sqrt()),
            ("conv3.p.b", 1.0 / (180.0f32).sqrt()),
        ];
        for (name, bound) in checks {
            let t = bundle.get(name).unwrap();
            assert!(
                t.data().iter().all(|v| v.abs() < bound),
                "{name} exceeds bound {bound}"
            );
            // and actually spreads out instead of collapsing to zero
            let max = t.data().iter().fold(0.0f32, |m, v| m.max(v.abs()));
            assert!(max > bound * 0.5, "{name} range looks degenerate");
        }
    }

    #[test]
    fn batchnorm_identity_statistics() {
        let arch = ArchitectureSpec::new(ArchId::Regular);
        let bundle = init_weights(&arch, &InitConfig { seed: 9 });
        assert!(bundle.get("bn1.gamma").unwrap().data().iter().all(|&v| v == 1.0));
        assert!(bundle.get("bn2.beta").unwrap().data().iter().all(|&v| v == 0.0));
        assert!(bundle.get("bn3.mean").unwrap().data().iter().all(|&v| v == 0.0));
        assert!(bundle.get("bn3.var").unwrap().data().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn five_seeds_give_pairwise_distinct_bundles() {
        let arch = ArchitectureSpec::new(ArchId::Regular);
        let bundles: Vec<_> = (0..5)
            .map(|seed| init_weights(&arch, &InitConfig { seed }))
            .collect();
        for i in 0..5 {
            for j in (i + 1)..5 {
                assert_ne!(
                    bundles[i].get("conv1.w").unwrap().data(),
                    bundles[j].get("conv1.w").unwrap().data(),
                    "seeds {i} and {j} coincide"
                );
            }
        }
    }
}

//! The architecture families studied: width, kernel size, depth, pooling,
//! stacked FC layers, and their CIFAR-10 counterparts.

use super::config::{
    ArchitectureConfig, DatasetConfig, ExperimentConfig, OptimizerConfig, PoolingInsertion, Profile, ScheduleConfig,
    SCHEMA_VERSION,
};
use crate::data::source::{CIFAR10, MNIST};
use crate::mi::EstimatorConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub family: &'static str,
    pub variants: Vec<ExperimentConfig>,
}

pub const FAMILIES: [&str; 8] = [
    "width",
    "kernel",
    "depth",
    "pooling",
    "multi_fc",
    "cifar_width",
    "cifar_depth",
    "cifar_pooling",
];

/// A paper-profile config for one architecture.
pub fn base_config(dataset: &str, widths: &[usize], kernels: &[usize], fc: &[usize]) -> ExperimentConfig {
    let mut c = ExperimentConfig {
        schema_version: SCHEMA_VERSION,
        sweep: None,
        variant: None,
        dataset: DatasetConfig {
            name: dataset.to_string(),
            train_size: 0,
            test_size: 0,
            seed: 0,
        },
        architecture: ArchitectureConfig {
            conv_widths: widths.to_vec(),
            kernel_sizes: kernels.to_vec(),
            pooling: Vec::new(),
            fc_widths: fc.to_vec(),
        },
        optimizer: OptimizerConfig {
            learning_rate: 1e-3,
            batch_size: 0,
        },
        schedule: ScheduleConfig {
            total_epochs: 0,
            measurement_epochs: Vec::new(),
        },
        estimator: EstimatorConfig::default(),
        run_seed: 0,
    };
    Profile::Paper.apply(&mut c);
    c
}

fn dashed(xs: &[usize]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("-")
}

fn variant(family: &str, label: String, mut c: ExperimentConfig) -> ExperimentConfig {
    c.sweep = Some(family.to_string());
    c.variant = Some(label);
    c
}

fn uniform(dataset: &str, width: usize, kernel: usize, depth: usize) -> ExperimentConfig {
    base_config(dataset, &vec![width; depth], &vec![kernel; depth], &[10])
}

fn width_family(family: &'static str, dataset: &str, widths: &[usize]) -> SweepSpec {
    SweepSpec {
        family,
        variants: widths
            .iter()
            .map(|&w| variant(family, dashed(&[w; 6]), uniform(dataset, w, 3, 6)))
            .collect(),
    }
}

fn depth_family(family: &'static str, dataset: &str, depths: &[usize]) -> SweepSpec {
    SweepSpec {
        family,
        variants: depths
            .iter()
            .map(|&d| variant(family, format!("depth{d}"), uniform(dataset, 6, 3, d)))
            .collect(),
    }
}

fn pooling_family(family: &'static str, dataset: &str, width: usize) -> SweepSpec {
    let plain = uniform(dataset, width, 3, 3);
    let mut pooled = plain.clone();
    pooled.architecture.pooling.push(PoolingInsertion { after_layer: 1, pool: 2 });
    SweepSpec {
        family,
        variants: vec![
            variant(family, "no-pool".into(), plain),
            variant(family, "pool".into(), pooled),
        ],
    }
}

pub fn sweep(family: &str) -> Option<SweepSpec> {
    Some(match family {
        "width" => width_family("width", MNIST, &[1, 3, 6, 12]),
        "kernel" => {
            let mut variants = Vec::new();
            for (depth, kernels) in [(3, [3, 7, 11]), (6, [3, 5, 7])] {
                for k in kernels {
                    variants.push(variant("kernel", format!("depth{depth}-k{k}"), uniform(MNIST, 3, k, depth)));
                }
            }
            SweepSpec {
                family: "kernel",
                variants,
            }
        }
        "depth" => depth_family("depth", MNIST, &[2, 3, 7, 10]),
        "pooling" => pooling_family("pooling", MNIST, 12),
        "multi_fc" => {
            let fc = [500, 1024, 500, 10];
            SweepSpec {
                family: "multi_fc",
                variants: vec![variant("multi_fc", dashed(&fc), base_config(MNIST, &[3; 5], &[3; 5], &fc))],
            }
        }
        "cifar_width" => width_family("cifar_width", CIFAR10, &[3, 6, 12]),
        "cifar_depth" => depth_family("cifar_depth", CIFAR10, &[2, 4, 7, 10]),
        "cifar_pooling" => pooling_family("cifar_pooling", CIFAR10, 6),
        _ => return None,
    })
}

pub fn default_sweeps() -> Vec<SweepSpec> {
    FAMILIES.iter().map(|f| sweep(f).expect("known family")).collect()
}

use advlab::binpack::{gen_coprime_construction, BinPackingInstance};
use advlab::cluster::{gen_theorem_instance, ClusterInstance};
use advlab::gasoline::{gen_extension, gen_lorieau_1d, GasolineInstance};
use advlab::knapsack::{gen_instance_i1, gen_instance_i2, KnapsackInstance};

use super::{Ctx, Report};
use crate::args::{BinpackGen, ClusterGen, Family, GasolineGen, GenerateCmd, KnapsackGen};
use crate::error::CliError;
use crate::record::fingerprint;

pub fn knapsack_instance(g: &KnapsackGen) -> Result<KnapsackInstance, CliError> {
    Ok(match g.family {
        Family::I1 => gen_instance_i1(g.n, g.k)?,
        Family::I2 => gen_instance_i2(g.n, g.k)?,
    })
}

pub fn binpack_instance(g: &BinpackGen) -> Result<BinPackingInstance, CliError> {
    Ok(gen_coprime_construction(g.m)?)
}

pub fn cluster_instance(g: &ClusterGen) -> Result<ClusterInstance, CliError> {
    Ok(gen_theorem_instance(g.d)?)
}

pub fn gasoline_instance(g: &GasolineGen) -> Result<GasolineInstance, CliError> {
    Ok(match g.lorieau {
        Some(k) => gen_lorieau_1d(k)?,
        None => gen_extension(g.d, g.k)?,
    })
}

pub fn run(ctx: &mut Ctx, cmd: &GenerateCmd) -> Result<Report, CliError> {
    let (problem, size, text) = match cmd {
        GenerateCmd::Knapsack(g) => {
            let i = knapsack_instance(g)?;
            ("knapsack", i.len(), i.to_text())
        }
        GenerateCmd::Binpack(g) => {
            let i = binpack_instance(g)?;
            ("binpack", i.len(), i.to_text())
        }
        GenerateCmd::Cluster(g) => {
            let i = cluster_instance(g)?;
            ("cluster", i.len(), i.to_text())
        }
        GenerateCmd::Gasoline(g) => {
            let i = gasoline_instance(g)?;
            ("gasoline", i.len(), i.to_text())
        }
    };
    let rec = &mut ctx.record;
    rec.problem = Some(problem.into());
    rec.fingerprint = Some(fingerprint(&text));
    rec.set("size", size);
    Ok(Report { artifact: Some(text), artifact_only: true, ..Report::default() })
}

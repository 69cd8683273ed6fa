//! Turns configuration entries into models and batteries.

use std::path::Path;

use ontolab::contextuality::parse_complex;
use ontolab::ontic::{
    bb_model, discrete_toy_model, shard_rng, ExtendedBbModel, KsModel, MacrorealistDevice,
    OntologicalModel, PreparationContext, Supplement,
};
use ontolab::quantum::random;
use ontolab::verifier::Measurement;
use ontolab::{BlochVector64, Ket64, ProjectiveMeasurement64, Ray64};
use rand_chacha::ChaCha8Rng;

use crate::config::{Component, MeasurementBattery, ModelSpec, StateBattery};
use crate::CliError;

/// Random batteries draw from ChaCha8 streams of the experiment seed above
/// this offset, one per purpose, clear of the Monte Carlo shard streams.
const BATTERY_STREAM: u64 = 1 << 40;

pub enum Stream {
    States = 1,
    Measurements = 2,
    ModelRays = 3,
    Projectors = 4,
    Instances = 5,
}

pub fn battery_rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    shard_rng(seed, BATTERY_STREAM + stream as u64)
}

pub struct BuiltModel {
    pub model: Box<dyn OntologicalModel>,
    /// Rays a finite model is defined on (toy models).
    pub declared_rays: Option<Vec<Ray64>>,
}

fn ket_from(components: &[Component]) -> Result<Ket64, CliError> {
    let amps = components
        .iter()
        .map(|c| match *c {
            Component::Real(x) => num_complex::Complex::new(x, 0.0),
            Component::Complex([re, im]) => num_complex::Complex::new(re, im),
        })
        .collect();
    Ket64::normalized(amps).map_err(|e| CliError::Config(format!("bad state vector: {e}")))
}

pub fn kets_from(list: &[Vec<Component>]) -> Result<Vec<Ket64>, CliError> {
    list.iter().map(|v| ket_from(v)).collect()
}

/// One ket per non-empty line; components as in vector-set files.
pub fn read_state_file(path: &Path) -> Result<Vec<Ket64>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    text.lines()
        .enumerate()
        .map(|(n, l)| (n + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
        .map(|(n, l)| {
            let amps = l
                .split_whitespace()
                .map(parse_complex)
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| {
                    CliError::Config(format!("{}:{n}: bad component", path.display()))
                })?;
            Ket64::normalized(amps)
                .map_err(|e| CliError::Config(format!("{}:{n}: {e}", path.display())))
        })
        .collect()
}

pub fn kets(
    battery: &StateBattery,
    dim: usize,
    seed: Option<u64>,
    stream: Stream,
    base_dir: &Path,
) -> Result<Vec<Ket64>, CliError> {
    let kets = match battery {
        StateBattery::Random { random } => {
            let seed = seed.ok_or_else(|| {
                CliError::Config("missing field `seed` for a random battery".into())
            })?;
            let mut rng = battery_rng(seed, stream);
            (0..*random)
                .map(|_| random::random_ket(&mut rng, dim))
                .collect()
        }
        StateBattery::Explicit { explicit } => kets_from(explicit)?,
        StateBattery::Bloch { bloch } => bloch
            .iter()
            .map(|[x, y, z]| {
                BlochVector64::unit(*x, *y, *z)
                    .and_then(|b| b.to_ket())
                    .map_err(|e| CliError::Config(format!("bad Bloch vector: {e}")))
            })
            .collect::<Result<_, _>>()?,
        StateBattery::File { file } => read_state_file(&base_dir.join(file))?,
    };
    if let Some(k) = kets.iter().find(|k| k.dim() != dim) {
        return Err(CliError::Config(format!(
            "model/dimension mismatch: state of dimension {} for a dimension-{dim} model",
            k.dim()
        )));
    }
    Ok(kets)
}

pub fn measurements(
    battery: &MeasurementBattery,
    dim: usize,
    seed: Option<u64>,
) -> Result<Vec<Measurement>, CliError> {
    let ms: Vec<ProjectiveMeasurement64> = match battery {
        MeasurementBattery::Random { random } => {
            let seed = seed.ok_or_else(|| {
                CliError::Config("missing field `seed` for a random battery".into())
            })?;
            let mut rng = battery_rng(seed, Stream::Measurements);
            (0..*random)
                .map(|_| random::random_measurement(&mut rng, dim))
                .collect()
        }
        MeasurementBattery::Bases { bases } => bases
            .iter()
            .map(|b| {
                ProjectiveMeasurement64::from_basis(&kets_from(b)?)
                    .map_err(|e| CliError::Config(format!("bad measurement basis: {e}")))
            })
            .collect::<Result<_, _>>()?,
        MeasurementBattery::Axes { axes } => axes
            .iter()
            .map(|[x, y, z]| {
                let c = BlochVector64::unit(*x, *y, *z)
                    .map_err(|e| CliError::Config(format!("bad axis: {e}")))?;
                let kets = [c.to_ket(), (-c).to_ket()];
                let [Ok(a), Ok(b)] = kets else {
                    return Err(CliError::Config("bad axis".into()));
                };
                ProjectiveMeasurement64::from_basis(&[a, b])
                    .map_err(|e| CliError::Config(e.to_string()))
            })
            .collect::<Result<_, _>>()?,
    };
    if let Some(m) = ms.iter().find(|m| m.dim() != dim) {
        return Err(CliError::Config(format!(
            "model/dimension mismatch: measurement of dimension {} for a dimension-{dim} model",
            m.dim()
        )));
    }
    Ok(ms.into_iter().map(Measurement::from).collect())
}

pub fn pointer_kets(list: Option<&Vec<Vec<Component>>>) -> Result<[Ket64; 2], CliError> {
    match list {
        None => Ok([
            Ket64::basis(2, 0).expect("qubit"),
            Ket64::basis(2, 1).expect("qubit"),
        ]),
        Some(v) => {
            let kets = kets_from(v)?;
            <[Ket64; 2]>::try_from(kets)
                .map_err(|k| CliError::Config(format!("expected 2 pointer kets, got {}", k.len())))
        }
    }
}

pub fn model(spec: &ModelSpec, seed: Option<u64>, base_dir: &Path) -> Result<BuiltModel, CliError> {
    let cfg =
        |e: ontolab::ontic::ModelError| CliError::Config(format!("model `{}`: {e}", spec.name));
    let plain = |model: Box<dyn OntologicalModel>| BuiltModel {
        model,
        declared_rays: None,
    };
    let dim = spec.dim.unwrap_or(2);
    Ok(match spec.name.as_str() {
        "bb" => plain(Box::new(bb_model(dim).map_err(cfg)?)),
        "ks" => plain(Box::new(KsModel::with_dim(dim).map_err(cfg)?)),
        "extended-bb" => plain(Box::new(
            ExtendedBbModel::new(dim, Supplement::FairCoin).map_err(cfg)?,
        )),
        "extended-dup" => plain(Box::new(
            ExtendedBbModel::new(dim, Supplement::DuplicateRay).map_err(cfg)?,
        )),
        "macrorealist" => {
            let pointers = pointer_kets(spec.pointers.as_ref())?;
            plain(Box::new(
                MacrorealistDevice::new(dim, pointers).map_err(cfg)?,
            ))
        }
        "toy" => {
            let rays_spec = spec
                .rays
                .as_ref()
                .ok_or_else(|| CliError::Config("model `toy`: missing field `rays`".into()))?;
            let rays: Vec<Ray64> = kets(rays_spec, dim, seed, Stream::ModelRays, base_dir)?
                .iter()
                .map(Ket64::ray)
                .collect();
            let copies = spec.copies.unwrap_or(1);
            let spreads = match &spec.contexts {
                Some(map) => map
                    .iter()
                    .map(|(k, w)| (PreparationContext::from(k.as_str()), w.clone()))
                    .collect(),
                None => vec![(
                    PreparationContext::default(),
                    vec![1.0 / copies.max(1) as f64; copies],
                )],
            };
            let toy = discrete_toy_model(rays.clone(), copies, spreads).map_err(cfg)?;
            BuiltModel {
                model: Box::new(toy),
                declared_rays: Some(rays),
            }
        }
        other => return Err(CliError::Config(format!("unknown model `{other}`"))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(name: &str, dim: Option<usize>) -> ModelSpec {
        ModelSpec {
            name: name.into(),
            dim,
            rays: None,
            copies: None,
            contexts: None,
            pointers: None,
        }
    }

    #[test]
    fn builds_models_by_name() {
        for (name, dim) in [
            ("bb", 2),
            ("ks", 2),
            ("extended-bb", 2),
            ("extended-dup", 2),
            ("macrorealist", 4),
        ] {
            let m = model(&spec(name, None), None, Path::new(".")).unwrap();
            assert_eq!(m.model.dim(), dim, "{name}");
        }
        assert!(matches!(
            model(&spec("ks", Some(3)), None, Path::new(".")),
            Err(CliError::Config(_))
        ));
        assert!(matches!(
            model(&spec("bohm", None), None, Path::new(".")),
            Err(CliError::Config(_))
        ));
    }

    #[test]
    fn toy_model_keeps_its_rays() {
        let mut s = spec("toy", Some(3));
        s.rays = Some(StateBattery::Random { random: 4 });
        s.copies = Some(2);
        let m = model(&s, Some(5), Path::new(".")).unwrap();
        assert_eq!(m.declared_rays.as_ref().unwrap().len(), 4);
        assert_eq!(m.model.ontic_states().unwrap().len(), 8);
        assert!(model(&s, None, Path::new(".")).is_err());
    }

    #[test]
    fn random_batteries_are_seeded() {
        let b = StateBattery::Random { random: 3 };
        let a = kets(&b, 3, Some(9), Stream::States, Path::new(".")).unwrap();
        let again = kets(&b, 3, Some(9), Stream::States, Path::new(".")).unwrap();
        let other = kets(&b, 3, Some(10), Stream::States, Path::new(".")).unwrap();
        assert_eq!(a, again);
        assert_ne!(a, other);
    }

    #[test]
    fn explicit_states_are_normalized_and_checked() {
        let b = StateBattery::Explicit {
            explicit: vec![vec![Component::Real(3.0), Component::Complex([0.0, 4.0])]],
        };
        let k = kets(&b, 2, None, Stream::States, Path::new(".")).unwrap();
        assert!((k[0].amplitudes()[1].im - 0.8).abs() < 1e-15);
        let err = kets(&b, 3, None, Stream::States, Path::new(".")).unwrap_err();
        assert!(err.to_string().contains("mismatch"));
    }

    #[test]
    fn axes_give_qubit_measurements() {
        let ms = measurements(
            &MeasurementBattery::Axes {
                axes: vec![[0.0, 0.0, 1.0]],
            },
            2,
            None,
        )
        .unwrap();
        assert_eq!(ms[0].events().len(), 2);
        assert!(measurements(&MeasurementBattery::Random { random: 1 }, 2, None).is_err());
    }
}

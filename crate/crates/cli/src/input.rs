use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::de::DeserializeOwned;
use serde_json::Value;

use kreinkit::fixpoint::{GroupRep, RepFile};
use kreinkit::group::FiniteGroup;
use kreinkit::json::MatrixJson;
use kreinkit::qpd::{GroupFunction, ValuesFile};
use kreinkit::{BallPoint, BlockOperator, CMat, IndefiniteSpace};

fn read_json(path: &Path) -> Result<Value> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn decode<T: DeserializeOwned>(v: Value, path: &Path) -> Result<T> {
    serde_json::from_value(v).with_context(|| format!("decoding {}", path.display()))
}

/// `"k,m"` to a signature.
pub fn parse_signature(s: &str) -> Result<IndefiniteSpace> {
    let (k, m) = s
        .split_once(',')
        .ok_or_else(|| anyhow!("signature must look like `n_minus,n_plus`, got {s:?}"))?;
    let k: usize = k
        .trim()
        .parse()
        .with_context(|| format!("bad n_minus in {s:?}"))?;
    let m: usize = m
        .trim()
        .parse()
        .with_context(|| format!("bad n_plus in {s:?}"))?;
    Ok(IndefiniteSpace::new(k, m)?)
}

/// A level count `N` (levels `ceil(i·n-/N), ceil(i·n+/N)`) or an explicit
/// list `k,m;k,m;...`.
pub fn parse_levels(s: &str, space: IndefiniteSpace) -> Result<Vec<(usize, usize)>> {
    if let Ok(count) = s.trim().parse::<usize>() {
        if count == 0 {
            bail!("at least one ladder level is needed");
        }
        let (k, m) = (space.n_minus(), space.n_plus());
        let mut levels: Vec<(usize, usize)> = Vec::new();
        for i in 1..=count {
            let level = ((i * k).div_ceil(count), (i * m).div_ceil(count));
            if levels.last() != Some(&level) && level.0 + level.1 > 0 {
                levels.push(level);
            }
        }
        return Ok(levels);
    }
    s.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let sp = parse_signature(p)?;
            Ok((sp.n_minus(), sp.n_plus()))
        })
        .collect()
}

/// Operator JSON `{"space", "matrix"}`, or a bare matrix plus `signature`.
pub fn read_operator(path: &Path, signature: Option<&str>) -> Result<BlockOperator> {
    let v = read_json(path)?;
    let flag = signature.map(parse_signature).transpose()?;
    if v.get("space").is_some() {
        let op: BlockOperator = decode(v, path)?;
        if let Some(sp) = flag {
            if sp != op.space {
                bail!(
                    "--signature {sp:?} disagrees with the file's {:?}",
                    op.space
                );
            }
        }
        return Ok(BlockOperator::new(op.space, op.matrix)?);
    }
    let space =
        flag.ok_or_else(|| anyhow!("{} holds a bare matrix; pass --signature", path.display()))?;
    let m: MatrixJson = decode(v, path)?;
    let m = CMat::try_from(m).map_err(|e| anyhow!("{}: {e}", path.display()))?;
    Ok(BlockOperator::new(space, m)?)
}

/// Ball point JSON `{"space", "matrix"}` or a bare `n+ x n-` matrix.
pub fn read_ball_point(path: &Path) -> Result<BallPoint> {
    let v = read_json(path)?;
    if v.get("space").is_some() {
        let p: BallPoint = decode(v, path)?;
        return Ok(BallPoint::new(p.space, p.matrix)?);
    }
    let m: MatrixJson = decode(v, path)?;
    let m = CMat::try_from(m).map_err(|e| anyhow!("{}: {e}", path.display()))?;
    Ok(BallPoint::from_matrix(m)?)
}

/// A group JSON file, or failing that a group name.
pub fn read_group(source: &str) -> Result<FiniteGroup> {
    let path = Path::new(source);
    if path.exists() {
        let v = read_json(path)?;
        return decode(v, path);
    }
    FiniteGroup::by_name(source)
        .map_err(|e| anyhow!("{source:?} is neither a readable file nor a known group: {e}"))
}

pub fn read_rep(path: &Path, group: FiniteGroup) -> Result<GroupRep> {
    let file: RepFile = decode(read_json(path)?, path)?;
    Ok(GroupRep::from_file(group, file)?)
}

pub fn read_function(path: &Path, group: FiniteGroup) -> Result<GroupFunction> {
    let file: ValuesFile = decode(read_json(path)?, path)?;
    Ok(GroupFunction::from_file(group, file)?)
}

use std::collections::HashMap;
use std::hash::{BuildHasherDefault, Hasher};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moebius::{BoundaryPoint, HalfSpacePoint, MoebiusTransform};

use super::spatial::chord2;
use super::words::{reduced_prefixes, visit_reduced_words};
use super::GroupPresentation;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SampleMethod {
    /// Attracting fixed points of loxodromic words plus boundary shadows of
    /// deep orbit points.
    FixedPointsAndShadows,
    /// Points supplied directly by the caller.
    Explicit,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct LimitSetConfig {
    /// Points closer than this (boundary metric) are merged.
    pub dedup_resolution: f64,
    /// Orbit points of the base point below this height contribute their
    /// vertical projection.
    pub shadow_height: f64,
    /// Trace tolerance when deciding whether a word is loxodromic.
    pub classify_tolerance: f64,
    /// Worker cap; `None` uses the ambient rayon pool.
    pub threads: Option<usize>,
}

impl Default for LimitSetConfig {
    fn default() -> Self {
        LimitSetConfig {
            dedup_resolution: 1e-6,
            shadow_height: 1e-5,
            classify_tolerance: 1e-9,
            threads: None,
        }
    }
}

/// Finite approximation of a limit set.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LimitSetSample {
    pub points: Vec<BoundaryPoint>,
    pub max_word_length: usize,
    pub method: SampleMethod,
    pub dedup_resolution: f64,
    pub words_visited: u64,
    pub warnings: Vec<String>,
}

impl LimitSetSample {
    /// Wraps caller-supplied points, deduplicated at `dedup_resolution`.
    pub fn from_points(points: impl IntoIterator<Item = BoundaryPoint>, dedup_resolution: f64) -> Self {
        let mut dedup = Deduper::new(dedup_resolution);
        let points = points.into_iter().filter(|p| dedup.insert(*p)).collect();
        LimitSetSample {
            points,
            max_word_length: 0,
            method: SampleMethod::Explicit,
            dedup_resolution,
            words_visited: 0,
            warnings: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Copy with `extra` appended (deduplicated against existing points).
    pub fn with_points(&self, extra: impl IntoIterator<Item = BoundaryPoint>) -> Self {
        let mut dedup = Deduper::new(self.dedup_resolution);
        let mut points = Vec::with_capacity(self.points.len());
        for p in self.points.iter().copied().chain(extra) {
            if dedup.insert(p) {
                points.push(p);
            }
        }
        LimitSetSample { points, ..self.clone() }
    }
}

/// Samples the limit set from reduced words of length `≤ max_len`.
///
/// Work is split over reduced prefixes of length two; each worker fills a
/// locally deduplicated buffer, and buffers are merged in prefix order, so
/// the output is independent of the thread count.
pub fn limit_set_sample(
    group: &GroupPresentation,
    max_len: usize,
    base: HalfSpacePoint,
    config: &LimitSetConfig,
) -> Result<LimitSetSample> {
    if max_len < 2 {
        return Err(Error::InvalidArgument(format!("word length must be at least 2, got {max_len}")));
    }
    if !(config.dedup_resolution > 0.0) || !(config.shadow_height > 0.0) {
        return Err(Error::InvalidArgument("dedup resolution and shadow height must be positive".into()));
    }

    let prefix_len = 2;
    let prefixes = reduced_prefixes(group.rank(), prefix_len);

    let collect = |prefix: &[usize]| -> (Vec<BoundaryPoint>, u64) {
        let mut dedup = Deduper::new(config.dedup_resolution);
        let mut buffer = Vec::new();
        let mut visited = 0u64;
        visit_reduced_words(group, max_len, prefix, |_, w| {
            visited += 1;
            for p in word_points(w, base, config) {
                if dedup.insert(p) {
                    buffer.push(p);
                }
            }
        });
        (buffer, visited)
    };

    // words shorter than the split prefix
    let (mut short, mut visited) = (Vec::new(), 0u64);
    for p in reduced_prefixes(group.rank(), 1) {
        let w = super::word_transform(group, &p);
        visited += 1;
        short.extend(word_points(&w, base, config));
    }

    let run = || prefixes.par_iter().map(|p| collect(p)).collect::<Vec<_>>();
    let chunks = match config.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::ResourceLimit(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    };

    let mut dedup = Deduper::new(config.dedup_resolution);
    let mut points = Vec::new();
    for p in short {
        if dedup.insert(p) {
            points.push(p);
        }
    }
    for (chunk, n) in chunks {
        visited += n;
        for p in chunk {
            if dedup.insert(p) {
                points.push(p);
            }
        }
    }

    let mut warnings = Vec::new();
    if points.len() < 2 * group.rank() || points.len() <= 2 {
        warnings.push(format!(
            "only {} distinct limit points for {} generators: group looks elementary or non-discrete",
            points.len(),
            group.rank()
        ));
    }
    for (i, j, v) in group.jorgensen_violations() {
        warnings.push(format!(
            "generators {i} and {j} violate Jorgensen's inequality ({v:.6} < 1): group is not discrete"
        ));
    }

    Ok(LimitSetSample {
        points,
        max_word_length: max_len,
        method: SampleMethod::FixedPointsAndShadows,
        dedup_resolution: config.dedup_resolution,
        words_visited: visited,
        warnings,
    })
}

fn word_points(w: &MoebiusTransform, base: HalfSpacePoint, config: &LimitSetConfig) -> impl Iterator<Item = BoundaryPoint> {
    let tr = w.trace();
    let tr2 = tr * tr;
    let loxodromic = !(tr2.im.abs() <= config.classify_tolerance && tr2.re <= 4.0 + config.classify_tolerance);
    let fixed = if loxodromic { w.attracting_fixed_point() } else { None };
    let image = w.apply_halfspace(base);
    let shadow = (image.t < config.shadow_height).then(|| BoundaryPoint::new(image.z));
    fixed.into_iter().chain(shadow)
}

#[derive(Default)]
struct CellHasher(u64);

impl Hasher for CellHasher {
    fn finish(&self) -> u64 {
        self.0
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.write_u64(b as u64);
        }
    }

    fn write_u64(&mut self, x: u64) {
        self.0 = (self.0.rotate_left(5) ^ x).wrapping_mul(0x51_7c_c1_b7_27_22_0a_95);
    }

    fn write_i64(&mut self, x: i64) {
        self.write_u64(x as u64);
    }
}

/// Greedy first-come deduplication on the sphere: a point is kept unless a
/// kept point lies within the resolution.
///
/// Cells are twice the chord limit wide, so a close point can only sit in
/// the point's own cell or the nearer neighbor along each axis: eight
/// probes. Kept points are chained per cell through `next`.
pub(crate) struct Deduper {
    cell: f64,
    chord_limit2: f64,
    heads: HashMap<[i64; 3], u32, BuildHasherDefault<CellHasher>>,
    points: Vec<[f64; 3]>,
    next: Vec<u32>,
}

const END: u32 = u32::MAX;

impl Deduper {
    pub(crate) fn new(resolution: f64) -> Self {
        // boundary distance d corresponds to chord 2 sin d on the unit sphere
        let chord = 2.0 * resolution.sin();
        Deduper {
            cell: 2.0 * chord,
            chord_limit2: chord * chord,
            heads: HashMap::default(),
            points: Vec::new(),
            next: Vec::new(),
        }
    }

    fn occupied_near(&self, key: [i64; 3], v: &[f64; 3]) -> bool {
        let mut i = match self.heads.get(&key) {
            Some(&h) => h,
            None => return false,
        };
        while i != END {
            if chord2(&self.points[i as usize], v) < self.chord_limit2 {
                return true;
            }
            i = self.next[i as usize];
        }
        false
    }

    pub(crate) fn insert(&mut self, p: BoundaryPoint) -> bool {
        let v = p.to_sphere();
        let mut key = [0i64; 3];
        let mut side = [0i64; 3];
        for a in 0..3 {
            let f = v[a] / self.cell;
            let fl = f.floor();
            key[a] = fl as i64;
            side[a] = if f - fl < 0.5 { -1 } else { 1 };
        }
        for mask in 0..8 {
            let probe = [
                key[0] + if mask & 1 != 0 { side[0] } else { 0 },
                key[1] + if mask & 2 != 0 { side[1] } else { 0 },
                key[2] + if mask & 4 != 0 { side[2] } else { 0 },
            ];
            if self.occupied_near(probe, &v) {
                return false;
            }
        }
        let idx = self.points.len() as u32;
        let head = self.heads.entry(key).or_insert(END);
        self.next.push(*head);
        *head = idx;
        self.points.push(v);
        true
    }
}

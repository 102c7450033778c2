//! Shared map corpus for the integration suites.

use compop::selfmap::SelfMap;
use compop::space::{Point, Space};

pub fn pt(length: u64, index: u64) -> Point {
    Point::new(length, index)
}

/// A varied corpus of symbolic maps on the path space: constants, identity
/// perturbations, and ray advances, with and without overrides.
pub fn path_corpus() -> (Space, Vec<SelfMap>) {
    let s = Space::path();
    let mut maps = Vec::new();

    maps.push(SelfMap::identity(&s));
    for (from, to) in [(0, 5), (1, 0), (3, 7), (6, 2)] {
        maps.push(
            SelfMap::identity(&s)
                .with_override(pt(from, 0), pt(to, 0))
                .unwrap(),
        );
    }
    maps.push(
        SelfMap::identity(&s)
            .with_overrides([(pt(0, 0), pt(2, 0)), (pt(2, 0), pt(0, 0))])
            .unwrap(),
    );
    maps.push(
        SelfMap::identity(&s)
            .with_overrides([(pt(1, 0), pt(4, 0)), (pt(4, 0), pt(1, 0)), (pt(7, 0), pt(0, 0))])
            .unwrap(),
    );

    for k in 1..=6 {
        maps.push(SelfMap::ray_advance(&s, k).unwrap());
    }
    maps.push(
        SelfMap::ray_advance(&s, 1)
            .unwrap()
            .with_override(pt(0, 0), pt(0, 0))
            .unwrap(),
    );
    maps.push(
        SelfMap::ray_advance(&s, 2)
            .unwrap()
            .with_overrides([(pt(1, 0), pt(4, 0)), (pt(5, 0), pt(0, 0))])
            .unwrap(),
    );
    maps.push(
        SelfMap::ray_advance(&s, 3)
            .unwrap()
            .with_override(pt(2, 0), pt(2, 0))
            .unwrap(),
    );

    for l in 0..=9 {
        maps.push(SelfMap::constant(&s, pt(l, 0)).unwrap());
    }
    maps.push(
        SelfMap::constant(&s, pt(0, 0))
            .unwrap()
            .with_override(pt(1, 0), pt(2, 0))
            .unwrap(),
    );
    maps.push(
        SelfMap::constant(&s, pt(2, 0))
            .unwrap()
            .with_overrides([(pt(0, 0), pt(6, 0)), (pt(3, 0), pt(1, 0))])
            .unwrap(),
    );
    maps.push(
        SelfMap::constant(&s, pt(4, 0))
            .unwrap()
            .with_override(pt(4, 0), pt(0, 0))
            .unwrap(),
    );
    maps.push(
        SelfMap::constant(&s, pt(1, 0))
            .unwrap()
            .with_overrides([(pt(2, 0), pt(2, 0)), (pt(5, 0), pt(3, 0))])
            .unwrap(),
    );

    (s, maps)
}

/// A smaller corpus on the binary homogeneous tree, exercising points with
/// nonzero indices.
pub fn tree_corpus() -> (Space, Vec<SelfMap>) {
    let s = Space::homogeneous_tree(2).unwrap();
    let mut maps = Vec::new();

    maps.push(SelfMap::identity(&s));
    maps.push(
        SelfMap::identity(&s)
            .with_override(pt(1, 1), pt(0, 0))
            .unwrap(),
    );
    maps.push(
        SelfMap::identity(&s)
            .with_overrides([(pt(2, 3), pt(1, 0)), (pt(3, 5), pt(2, 2))])
            .unwrap(),
    );
    for k in 1..=3 {
        maps.push(SelfMap::ray_advance(&s, k).unwrap());
    }
    maps.push(
        SelfMap::ray_advance(&s, 1)
            .unwrap()
            .with_override(pt(2, 1), pt(0, 0))
            .unwrap(),
    );
    for p in [pt(0, 0), pt(1, 0), pt(1, 1), pt(2, 3), pt(3, 7)] {
        maps.push(SelfMap::constant(&s, p).unwrap());
    }
    maps.push(
        SelfMap::constant(&s, pt(1, 1))
            .unwrap()
            .with_override(pt(2, 2), pt(3, 4))
            .unwrap(),
    );

    (s, maps)
}

/// All unordered pairs of distinct maps.
pub fn distinct_pairs(maps: &[SelfMap]) -> Vec<(&SelfMap, &SelfMap)> {
    let mut pairs = Vec::new();
    for i in 0..maps.len() {
        for j in (i + 1)..maps.len() {
            if maps[i] != maps[j] {
                pairs.push((&maps[i], &maps[j]));
            }
        }
    }
    pairs
}

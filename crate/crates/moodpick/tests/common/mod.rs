#![allow(dead_code)]

use std::path::{Path, PathBuf};

use moodpick::assets::Resources;
use moodpick::files::{ingest_into, ingest_manifest, read_manifest, save_catalog};
use moodpick_core::Catalog;

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures/group")
        .join(name)
}

/// The twelve candidates plus the four favorites, default parameters.
pub fn group_catalog() -> Catalog {
    let res = Resources::builtin();
    let mut catalog = ingest_manifest(
        &fixture("movies.json"),
        &res,
        Default::default(),
        Default::default(),
    )
    .expect("candidates ingest");
    let favorites = read_manifest(&fixture("favorites.json")).unwrap();
    let rejected = ingest_into(&mut catalog, &favorites, &fixture(""), &res);
    assert!(rejected.is_empty(), "{rejected:?}");
    catalog
}

pub fn write_group_catalog(dir: &Path) -> PathBuf {
    let path = dir.join("catalog.json");
    save_catalog(&group_catalog(), &path).unwrap();
    path
}

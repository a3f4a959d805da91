//! Bundled requirements tables.

pub const SC_TABLE: &str = include_str!("../data/sc.rt");
pub const OMM_RT0: &str = include_str!("../data/omm-rt0.rt");
pub const OMM_RT1: &str = include_str!("../data/omm-rt1.rt");
pub const OMM_RT2: &str = include_str!("../data/omm-rt2.rt");

/// `(file name, contents)` for every bundled table.
pub const TABLES: [(&str, &str); 4] = [
    ("sc.rt", SC_TABLE),
    ("omm-rt0.rt", OMM_RT0),
    ("omm-rt1.rt", OMM_RT1),
    ("omm-rt2.rt", OMM_RT2),
];

/// Looks a bundled table up by file name, with or without the `.rt` suffix.
pub fn table_text(name: &str) -> Option<&'static str> {
    let key = name.strip_suffix(".rt").unwrap_or(name);
    TABLES
        .iter()
        .find(|(file, _)| file.strip_suffix(".rt") == Some(key))
        .map(|(_, text)| *text)
}

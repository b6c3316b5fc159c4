//! `biotrig stats`: per-split trigger and entity annotation counts from a
//! prepared dataset, grouped by trigger category where known.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;

use biotrig_core::eval::CategoryMap;

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Prepared dataset directory (from `biotrig prepare`)
    #[arg(long)]
    pub prepared: PathBuf,
}

struct Row {
    label: String,
    train: u64,
    dev: u64,
    test: u64,
}

pub fn run(args: &StatsArgs) -> Result<()> {
    let prepared = super::PreparedDir::open(&args.prepared)?;
    let path = prepared.file("stats.tsv")?;
    let content =
        fs::read_to_string(&path).with_context(|| format!("cannot read {}", path.display()))?;

    let mut triggers: Vec<Row> = Vec::new();
    let mut entities: Vec<Row> = Vec::new();
    for (lineno, line) in content.lines().enumerate().skip(1) {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 5 {
            bail!("{}:{}: malformed stats row", path.display(), lineno + 1);
        }
        let parse = |s: &str| -> Result<u64> {
            s.parse()
                .with_context(|| format!("{}:{}: bad count {s:?}", path.display(), lineno + 1))
        };
        let row = Row {
            label: fields[1].to_string(),
            train: parse(fields[2])?,
            dev: parse(fields[3])?,
            test: parse(fields[4])?,
        };
        match fields[0] {
            "trigger" => triggers.push(row),
            "entity" => entities.push(row),
            other => bail!("{}:{}: unknown kind {other:?}", path.display(), lineno + 1),
        }
    }

    let map = CategoryMap::mlee();
    let mut by_category: BTreeMap<String, Vec<&Row>> = BTreeMap::new();
    for row in &triggers {
        let cat = map.category_of(&row.label).unwrap_or("-").to_string();
        by_category.entry(cat).or_default().push(row);
    }

    println!("Event triggers (per-annotation counts)");
    println!(
        "{:<12} {:<28} {:>7} {:>7} {:>10} {:>7}",
        "Category", "Trigger label", "Train", "Dev", "Train+Dev", "Test"
    );
    let category_order: Vec<String> = map
        .categories()
        .iter()
        .cloned()
        .chain(std::iter::once("-".to_string()))
        .collect();
    for cat in &category_order {
        let Some(rows) = by_category.get(cat) else {
            continue;
        };
        for row in rows {
            println!(
                "{:<12} {:<28} {:>7} {:>7} {:>10} {:>7}",
                cat,
                row.label,
                row.train,
                row.dev,
                row.train + row.dev,
                row.test
            );
        }
    }
    println!();
    println!("Entities (per-annotation counts)");
    println!(
        "{:<28} {:>7} {:>7} {:>10} {:>7}",
        "Entity label", "Train", "Dev", "Train+Dev", "Test"
    );
    for row in &entities {
        println!(
            "{:<28} {:>7} {:>7} {:>10} {:>7}",
            row.label,
            row.train,
            row.dev,
            row.train + row.dev,
            row.test
        );
    }
    Ok(())
}

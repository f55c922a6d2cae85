//! Materialize the embedding of every combination and recover points by
//! exact nearest-neighbour search. Also round-trips the table file.
//!
//! Run with `cargo run --release --example lookup_table`.

use cbo::{CategoricalSpace, LookupTable, RandomEmbedding};

fn main() -> cbo::Result<()> {
    let space = CategoricalSpace::binary(12)?;
    let embedding = RandomEmbedding::new(&space, 20, 1)?;
    let table = LookupTable::build(&space, &embedding)?;
    println!("{} rows of dimension {}", table.len(), table.dim());

    let mut exact = 0;
    for (rank, row) in table.rows() {
        if table.nearest_rank(row)? == rank {
            exact += 1;
        }
    }
    println!("left inverse holds for {exact}/{} combinations", table.len());

    // a point between two table rows snaps to one of them
    let a = table.row(5);
    let b = table.row(900);
    let mid: Vec<f64> = a.iter().zip(b).map(|(x, y)| 0.45 * x + 0.55 * y).collect();
    println!("midpoint recovers {}", table.nearest(&mid)?);

    let dir = std::env::temp_dir().join("cbo_lookup_example");
    std::fs::create_dir_all(&dir).map_err(|e| cbo::CboError::Io { path: dir.clone(), source: e })?;
    let path = dir.join("binary12.cbol");
    table.save(&path)?;
    let loaded = LookupTable::load(&path)?;
    println!("saved and reloaded {} ({} rows)", path.display(), loaded.len());
    Ok(())
}

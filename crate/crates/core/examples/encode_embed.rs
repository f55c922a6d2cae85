//! Encode a mixed categorical space to bits, embed it, and recover.
//!
//! Run with `cargo run --example encode_embed`.

use cbo::embedding::RECON_THRESHOLD;
use cbo::{CategoricalSpace, Combination, RandomEmbedding};

fn main() -> cbo::Result<()> {
    let space = CategoricalSpace::new(vec![3, 4, 5, 2])?;
    println!(
        "{} variables, N = {}, m = {} bits",
        space.num_variables(),
        space.cardinality(),
        space.code_length()
    );

    let c: Combination = "2;1;4;0".parse()?;
    let bits = space.encode(&c)?;
    println!("{c} -> rank {} -> bits {:?}", space.rank(&c)?, bits.0);
    assert_eq!(space.decode(&bits)?, c);

    let embedding = RandomEmbedding::new(&space, 8, 7)?;
    let x = embedding.embed(&bits)?;
    println!("embedded into R^{}: {:.3?}", x.len(), x);

    // pseudo-inverse reconstruction plus thresholding
    let recovered = embedding.recon_recover(&x, RECON_THRESHOLD)?;
    println!("recon recovery: {:?} (match: {})", recovered.0, recovered == bits);

    let (lo, hi) = embedding.hypercube_bounds();
    println!("polytope lies in the box with corners\n  {lo:.3?}\n  {hi:.3?}");
    Ok(())
}

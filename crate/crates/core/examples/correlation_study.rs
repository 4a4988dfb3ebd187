//! Correlation between early-citer strength and later citations, split by
//! whether the early citers are influential, then by co-author distance.

use early_citers::earlyciters::{CaBucket, EcOptions, Influence};
use early_citers::study::{
    bucketed_correlation_study, correlation_study, mine_example_pairs, generate_synthetic_corpus, Property, SynthParams,
};

fn main() -> early_citers::Result<()> {
    let mut params = SynthParams::with_papers(5000);
    params.stealing_strength = 0.5;
    let corpus = generate_synthetic_corpus(&params, 42)?.corpus()?.filter(2)?;
    let opts = EcOptions::default();
    let dts = [5, 8, 10, 12];

    let table = correlation_study(&corpus, Property::Pc, &opts, &dts)?;
    println!("{:>4}{:>15}{:>19}", "dt", "influential", "non-influential");
    for dt in dts {
        let rho = |s| table.rho(dt, s, None).map_or("-".to_string(), |r| format!("{r:+.3}"));
        println!("{dt:>4}{:>15}{:>19}", rho(Influence::Influential), rho(Influence::NonInfluential));
    }

    let bucketed = bucketed_correlation_study(&corpus, Property::Pc, &opts, &dts)?;
    println!("\ninfluential subset by co-author distance bucket");
    for dt in dts {
        let cells: Vec<String> = CaBucket::ALL
            .into_iter()
            .map(|b| {
                let rho = bucketed.rho(dt, Influence::Influential, Some(b));
                format!("{} {}", b.as_str(), rho.map_or("-".to_string(), |r| format!("{r:+.3}")))
            })
            .collect();
        println!("{dt:>4}  {}", cells.join("  "));
    }

    println!("\npairs with equal ECC, contrasting early-citer strength");
    for pair in mine_example_pairs(&corpus, Property::Pc, 10, &opts)?.iter().take(3) {
        println!(
            "ECC {:>2}: {} (PC {:.1}, later {}) vs {} (PC {:.1}, later {})",
            pair.ecc,
            pair.influential,
            pair.influential_value,
            pair.influential_ltsi,
            pair.non_influential,
            pair.non_influential_value,
            pair.non_influential_ltsi
        );
    }
    Ok(())
}

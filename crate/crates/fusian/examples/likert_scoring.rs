//! Score Likert responses into trait percentages.
//!
//! Run with: `cargo run --release --example likert_scoring`

use fusian::scoring::{accumulate, read_responses_csv, trait_percentage, LikertResponse, Pole};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // A short bipolar questionnaire: 1-2 favor the left pole, 4-5 the right,
    // 3 is neutral.
    let scores = [1, 1, 2, 3, 4, 1, 5, 2, 3, 1];
    let responses: Vec<LikertResponse> = scores
        .iter()
        .enumerate()
        .map(|(i, &s)| LikertResponse::new(i as i64, s))
        .collect::<Result<_, _>>()?;

    let points = accumulate(&responses)?;
    println!("responses: {scores:?}");
    println!("points:    left {} / right {}", points.left, points.right);
    println!("left pole:  {:.2}%", trait_percentage(&responses, Pole::Left)?);
    println!("right pole: {:.2}%", trait_percentage(&responses, Pole::Right)?);

    // Batches can also come from CSV files with `item_id,score` columns.
    let path = std::env::temp_dir().join("fusian_example_responses.csv");
    std::fs::write(&path, "item_id,score\n0,5\n1,4\n2,4\n3,3\n4,2\n")?;
    let from_csv = read_responses_csv(&path)?;
    println!(
        "csv batch of {} items: right pole {:.2}%",
        from_csv.len(),
        trait_percentage(&from_csv, Pole::Right)?
    );
    std::fs::remove_file(&path).ok();

    // All-neutral batches have no defined percentage.
    let neutral: Vec<LikertResponse> =
        (0..5).map(|i| LikertResponse::new(i, 3).unwrap()).collect();
    println!("all-neutral batch: {:?}", trait_percentage(&neutral, Pole::Left).unwrap_err());
    Ok(())
}

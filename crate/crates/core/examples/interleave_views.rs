//! Column-interleaves two gradient views for both fields of a slanted
//! pattern and writes the panel frames as PGM files.

use tdm3d::interleave::{interleave, source_map, InterleavePattern, Rational, ViewImage};
use tdm3d::Side;
use tdm3d::pnm::write_pgm;

fn main() -> tdm3d::Result<()> {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "out".into());
    std::fs::create_dir_all(&dir)?;
    let (w, h) = (64, 48);
    let left = ViewImage::from_fn(w, h, |_, c| c as f32 / (w - 1) as f32)?;
    let right = ViewImage::from_fn(w, h, |r, _| r as f32 / (h - 1) as f32)?;
    let pattern = InterleavePattern { columns_per_lens: 2, slant: Rational::new(1, 3)?, field_shift: 1 };
    for field in 0..2 {
        let frame = interleave(&left, &right, &pattern, field)?;
        let path = format!("{dir}/interleaved-field{field}.pgm");
        std::fs::write(&path, write_pgm(&frame))?;
        let rows: Vec<String> = (0..4)
            .map(|r| {
                let map = source_map(&pattern, 12, 4, field);
                map[r * 12..r * 12 + 12].iter().map(|s| if *s == Side::Left { 'L' } else { 'R' }).collect()
            })
            .collect();
        println!("{path}: {}x{}, top-left assignment {}", frame.width(), frame.height(), rows.join(" / "));
    }
    Ok(())
}

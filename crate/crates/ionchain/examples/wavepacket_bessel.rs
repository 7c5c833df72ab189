//! Ballistic spreading of the launched wave packet and its Bessel
//! closed forms.
//!
//! Deep inside an unbounded chain the amplitude k-1 sites from the
//! source is (-i)^(k-1) J_{k-1}(2Jt). Launching at site 1 of an open
//! chain adds the mirror image J_{k+1}(2Jt) that enforces the boundary;
//! behind the wavefront the image is order-one, ahead of it both forms
//! coincide.
//!
//! ```bash
//! cargo run --release --example wavepacket_bessel
//! ```

use ionchain::model::ChainParams;
use ionchain::oracle::{bessel_amplitude, bessel_edge_amplitude, EigenmodePropagator};

fn main() {
    let params = ChainParams::new(100).unwrap();
    let propagator = EigenmodePropagator::new(&params);

    for jt in [2.0, 5.0, 10.0] {
        let amps = propagator.amplitudes_at(jt);
        println!("Jt = {jt}: wavefront near site {:.0}", 2.0 * jt + 1.0);
        println!(
            "{:>6} {:>12} {:>14} {:>14}",
            "site", "|alpha_k|", "edge form", "infinite form"
        );
        for k in [1usize, 3, 5, 8, 10, 12, 15, 20, 30] {
            println!(
                "{k:>6} {:>12.6} {:>14.6} {:>14.6}",
                amps[k - 1].norm(),
                bessel_edge_amplitude(k, jt),
                bessel_amplitude(k, jt)
            );
        }
        println!();
    }

    // the survival amplitude of the launch site decays as t^{-3/2}, a
    // factor t faster than the infinite-chain J_0 envelope
    println!("survival of the launch site |alpha_1(t)|:");
    println!("{:>6} {:>12} {:>16}", "Jt", "|alpha_1|", "t^1.5 |alpha_1|");
    for jt in [5.0, 10.0, 20.0] {
        let a1 = propagator.amplitude_at(1, jt).norm();
        println!("{jt:>6} {a1:>12.6} {:>16.4}", jt.powf(1.5) * a1);
    }
}

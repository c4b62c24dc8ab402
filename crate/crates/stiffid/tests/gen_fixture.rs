//! Regenerates the stored bench campaign fixture. Run explicitly with
//! `cargo test -p stiffid --test gen_fixture -- --ignored` after
//! changing the generator, then review the diff.

mod common;

use stiffid::synth::{campaign_to_json, simulate_campaign, SynthSpec};

#[test]
#[ignore]
fn regenerate_bt_campaign_fixture() {
    let reference = common::fixture("bt_reference.json");
    let k = common::mat6_from(&reference["k_bt"]);
    let spec = SynthSpec::noiseless(k).with_hysteresis(2e-6);
    let campaign = simulate_campaign(&spec).expect("reference stiffness simulates");
    let json = campaign_to_json(&campaign);
    std::fs::write(common::fixture_path("bt_campaign.json"), json).unwrap();
}

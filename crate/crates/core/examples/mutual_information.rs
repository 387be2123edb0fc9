//! Quantum mutual information between the system and a growing fragment,
//! split into its classical (Holevo) part and the discord.

use qdarwin::ensembles::make_fig5_scenario;
use qdarwin::holevo::{mutual_information_pure, FragmentSelection};
use qdarwin::model::realize_environment;

fn main() -> qdarwin::Result<()> {
    let sc = make_fig5_scenario(32, 0.1, 3);
    let env = realize_environment(&sc.environment)?;
    let t = 4.0;
    println!("f,total,holevo,discord");
    for f in [1, 2, 4, 8, 16, 24, 31, 32] {
        let frag = FragmentSelection::prefix(f, env.len())?;
        let mi = mutual_information_pure(&sc.system, &env, &frag, t)?;
        println!("{f},{:.6},{:.6},{:.6}", mi.total, mi.holevo, mi.discord);
    }
    Ok(())
}

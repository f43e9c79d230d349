import pytest
from pydantic import ValidationError as PydanticValidationError

from app.config.sensing_exceptions import ScenarioConfigError
from app.schemas.scenario_schema import C0, OfdmNumerology, ArrayGeometry, Scenario, Target
from app.utils.scenario_loader import load_scenario, parse_targets, scenario_from_mapping


def test_default_scenario_matches_reference_setup():
    scenario = Scenario()
    assert scenario.numerology.nc == 4096
    assert scenario.numerology.m == 256
    assert [t.range_m for t in scenario.targets] == [500.0, 260.0]
    assert scenario.pt_watts == pytest.approx(39.81, rel=1e-3)
    assert scenario.geometry.dr == pytest.approx(C0 / 28e9 / 2)


def test_geometry_follows_carrier_wavelength():
    scenario = Scenario(numerology={'fc': 24e9})
    assert scenario.geometry.wavelength == pytest.approx(C0 / 24e9)
    assert scenario.geometry.dt == pytest.approx(C0 / 24e9 / 2)


def test_explicit_null_geometry_gets_default_array():
    scenario = Scenario(geometry=None)
    assert scenario.geometry is not None
    assert scenario.geometry.nr == 16
    assert Scenario.model_fields['geometry'].is_required() is False


def test_mismatched_wavelength_rejected():
    with pytest.raises(PydanticValidationError):
        Scenario(geometry=ArrayGeometry(wavelength=C0 / 24e9))


def test_too_short_cyclic_prefix_rejected():
    with pytest.raises(PydanticValidationError):
        OfdmNumerology(tcp=1e-12)


def test_duplicate_angles_rejected():
    with pytest.raises(PydanticValidationError):
        Scenario(targets=[Target(range_m=100.0, angle_deg=1.0), Target(range_m=200.0, angle_deg=1.0)])


def test_more_targets_than_elements_rejected():
    targets = [Target(range_m=100.0 + i, angle_deg=float(i)) for i in range(5)]
    with pytest.raises(PydanticValidationError):
        Scenario(geometry={'nr': 4}, targets=targets)


def test_with_target_range_revalidates():
    scenario = Scenario().with_target_range(0, 700.0)
    assert scenario.targets[0].range_m == 700.0
    assert scenario.targets[1].range_m == 260.0
    with pytest.raises(PydanticValidationError):
        Scenario().with_target_range(0, -1.0)


def test_parse_delimited_targets():
    targets = parse_targets("500,60,0,10; 260,40,2")
    assert targets == [
        {'range_m': 500.0, 'velocity_mps': 60.0, 'angle_deg': 0.0, 'rcs_m2': 10.0},
        {'range_m': 260.0, 'velocity_mps': 40.0, 'angle_deg': 2.0},
    ]


def test_parse_json_targets():
    targets = parse_targets('[{"range_m": 300, "angle_deg": 1}, [400, 0, -2, 5]]')
    assert targets[0] == {'range_m': 300, 'angle_deg': 1}
    assert targets[1]['angle_deg'] == -2


def test_parse_rejects_malformed_targets():
    with pytest.raises(ScenarioConfigError):
        parse_targets("500,abc")
    with pytest.raises(ScenarioConfigError):
        parse_targets("1,2,3,4,5")
    with pytest.raises(ScenarioConfigError):
        parse_targets(" ; ")


def test_load_scenario_file(tmp_path):
    path = tmp_path / "scenario.env"
    path.write_text(
        "nc=256\n"
        "m=16\n"
        "pt_dbm=40\n"
        "sigma2=1e-12\n"
        "seed=11\n"
        "targets=490,0,0,10;250,0,2,10\n"
    )
    scenario = load_scenario(path)
    assert scenario.numerology.nc == 256
    assert scenario.numerology.m == 16
    assert scenario.pt_dbm == 40.0
    assert scenario.sigma2 == pytest.approx(1e-12)
    assert scenario.seed == 11
    assert [t.angle_deg for t in scenario.targets] == [0.0, 2.0]


def test_load_without_path_gives_defaults():
    assert load_scenario() == Scenario()


def test_unknown_key_rejected():
    with pytest.raises(ScenarioConfigError):
        scenario_from_mapping({'bandwidth': '100e6'})


def test_invalid_value_wrapped():
    with pytest.raises(ScenarioConfigError):
        scenario_from_mapping({'nc': 'many'})


def test_missing_file_rejected(tmp_path):
    with pytest.raises(ScenarioConfigError):
        load_scenario(tmp_path / "absent.env")

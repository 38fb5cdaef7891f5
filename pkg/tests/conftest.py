def pytest_configure(config):
    config.addinivalue_line(
        "markers", "slow: multi-seed simulations and KEM sweeps (check.sh --quick)"
    )

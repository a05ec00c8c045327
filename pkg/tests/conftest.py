def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running sweeps; deselect with -m 'not slow'")

# Repository root on sys.path so `app` imports resolve under pytest.

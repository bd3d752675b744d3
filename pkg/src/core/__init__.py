# Core modules: audio, configuration, logging and presets

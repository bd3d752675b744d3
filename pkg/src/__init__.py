# WaveGuard - Source Package

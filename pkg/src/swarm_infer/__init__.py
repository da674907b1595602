"""Swarm Infer - CNN layer placement and latency simulation for UAV swarms."""

__version__ = "0.1.0"
__author__ = "Swarm Infer Team"
__description__ = "CNN layer placement engine and latency simulator for UAV swarms"

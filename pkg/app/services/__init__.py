"""Statistical services: ranking, covariance, statistics, bootstrap, simulation"""

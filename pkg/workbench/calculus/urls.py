"""Url list for calculus"""
from django.urls import path
from . import views

app_name = 'calculus'

urlpatterns = [
    path('runs/', views.runs, name='runs'),
    path('runs/<int:run_id>/', views.run_detail, name='run_detail'),
    path('elect/', views.elect, name='elect'),
]
